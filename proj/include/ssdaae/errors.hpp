#pragma once

#include <stdexcept>
#include <string>

namespace ssdaae {

// Operand shapes are incompatible with the operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value lies outside the domain of the operation (e.g. log of a non-positive number).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller broke an API precondition (non-scalar loss, missing gradient, empty set).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid configuration value or key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data handed to a component that the component's protocol forbids.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssdaae
