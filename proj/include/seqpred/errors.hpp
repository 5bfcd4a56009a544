#pragma once

#include <stdexcept>

namespace seqpred {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning on a prefix of probability zero.
class UndefinedConditional : public Error {
 public:
  using Error::Error;
};

// Exact enumeration requested beyond the configured horizon cap.
class HorizonTooLarge : public Error {
 public:
  using Error::Error;
};

// The environment measure is not an entry of the model class, so no weight
// is available to bound its relative entropy.
class ModelNotInClass : public Error {
 public:
  using Error::Error;
};

// A bound formula was called outside its stated domain.
class InvalidRange : public Error {
 public:
  using Error::Error;
};

// No winning strategy exists: the informed average profit is not positive.
class NonpositiveEdge : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqpred
