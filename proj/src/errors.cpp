#include "gdprsim/errors.hpp"

#include <array>

namespace gdprsim {

namespace {
const std::array<std::string, 14> kNames = {
    "Ok",
    "DuplicateRegistration",
    "UnknownDevice",
    "AuthMismatch",
    "NotAPatient",
    "UnregisteredReader",
    "WrongDeviceKind",
    "NotFound",
    "StrictPreconditionFailed",
    "UnknownHospital",
    "NotStaff",
    "HospitalNotRegistered",
    "NoAccessibleData",
    "SequenceGap",
};
}  // namespace

const std::string& to_string(ErrorCode code) {
  return kNames[static_cast<std::size_t>(code)];
}

bool error_code_from_string(const std::string& name, ErrorCode& out) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) {
      out = static_cast<ErrorCode>(i);
      return true;
    }
  }
  return false;
}

}  // namespace gdprsim
