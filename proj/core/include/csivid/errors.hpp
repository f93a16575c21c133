// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace csivid {

/// Base class for all csivid errors. Subcommands map these onto exit codes.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- data / format errors ---------------------------------------------------

class BadMagic : public Error {
  public:
    explicit BadMagic(const std::string& msg) : Error(msg) {}
};

class TruncatedRecord : public Error {
  public:
    explicit TruncatedRecord(const std::string& msg) : Error(msg) {}
};

class NonMonotonicTimestamps : public Error {
  public:
    explicit NonMonotonicTimestamps(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
  public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class SequenceTooShort : public Error {
  public:
    explicit SequenceTooShort(const std::string& msg) : Error(msg) {}
};

class EmptyInputs : public Error {
  public:
    explicit EmptyInputs(const std::string& msg) : Error(msg) {}
};

class ShapeMismatch : public Error {
  public:
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

class NoInstances : public Error {
  public:
    explicit NoInstances(const std::string& msg) : Error(msg) {}
};

class GeometryError : public Error {
  public:
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// --- numeric errors ---------------------------------------------------------

class NonFiniteGradient : public Error {
  public:
    explicit NonFiniteGradient(const std::string& msg) : Error(msg) {}
};

class NonFiniteLoss : public Error {
  public:
    explicit NonFiniteLoss(const std::string& msg) : Error(msg) {}
};

class UsageError : public Error {
  public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

}  // namespace csivid
