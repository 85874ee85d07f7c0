#pragma once

#include <string>

namespace gdprsim {

enum class ErrorCode {
  Ok,
  DuplicateRegistration,
  UnknownDevice,
  AuthMismatch,
  NotAPatient,
  UnregisteredReader,
  WrongDeviceKind,
  NotFound,
  StrictPreconditionFailed,
  UnknownHospital,
  NotStaff,
  HospitalNotRegistered,
  NoAccessibleData,
  SequenceGap,
};

const std::string& to_string(ErrorCode code);

// Returns false if the name is not a known code.
bool error_code_from_string(const std::string& name, ErrorCode& out);

}  // namespace gdprsim
