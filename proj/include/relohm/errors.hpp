// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace relohm {

/// Base of every error raised by the library. Callers that only need to
/// distinguish "bad input" from "outside the physical domain" can use
/// DomainError and ConfigError below.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside the region where the response theory is defined
/// (static fields, vanishing boosted frequency, table extrapolation).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Input is malformed or violates a structural invariant.
class ConfigError : public Error {
public:
  using Error::Error;
};

class SpeedLimit : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class NotOrthogonal : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class NotLorentz : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class DegenerateDecomposition : public Error {
public:
  using Error::Error;
};

class StaticFrequency : public DomainError {
public:
  using DomainError::DomainError;
};

class BoostResonance : public DomainError {
public:
  using DomainError::DomainError;
};

class OutOfRange : public DomainError {
public:
  using DomainError::DomainError;
};

class FrameMismatch : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class InvariantViolation : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class ParseError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

}  // namespace relohm
