#pragma once

#include <stdexcept>
#include <string>

namespace fusebench {

/// Violated precondition: mismatched dimensions, out-of-range labels, bad parameters.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every class of a confusion matrix is undefined, so no mIoU exists.
class EmptyEvaluationError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// File-level failures (missing file, undecodable PNG, unwritable directory).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fusebench
