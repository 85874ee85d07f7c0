#include "gdprsim/label_model.hpp"

namespace gdprsim {

bool may_read(const DlmLabel& label, const ActorId& actor) {
  return actor == label.owner || label.readers.contains(actor);
}

bool flow_permitted(const LabelledItem& item, const ActorId& destination) {
  return may_read(item.label, destination);
}

ItemKey item_identity(const LabelledItem& item) { return item.key(); }

}  // namespace gdprsim
