#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace slip {

// Paired endpoint is gone; raised by operations that would otherwise wait forever.
class DuctClosed : public std::runtime_error {
 public:
  DuctClosed() : std::runtime_error("duct closed: paired endpoint destroyed") {}
};

class TransportError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class AddressUnreachable : public TransportError {
  using TransportError::TransportError;
};

class PayloadTooLarge : public std::length_error {
  using std::length_error::length_error;
};

class BarrierBroken : public std::runtime_error {
 public:
  BarrierBroken() : std::runtime_error("barrier broken: a participant left early") {}
  using std::runtime_error::runtime_error;
};

class InvalidDimensions : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class InvalidTopology : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class NoUpdatesElapsed : public std::domain_error {
 public:
  NoUpdatesElapsed() : std::domain_error("no updates elapsed in snapshot window") {}
};

class NoSendsAttempted : public std::domain_error {
 public:
  NoSendsAttempted() : std::domain_error("no sends attempted in snapshot window") {}
};

class EmptyInput : public std::invalid_argument {
 public:
  EmptyInput() : std::invalid_argument("empty input") {}
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class LaunchError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace slip
