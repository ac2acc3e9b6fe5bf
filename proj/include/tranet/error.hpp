#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tranet {

/// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A string that is not in the cardinal grammar of the requested language.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EncodingError : public Error {
 public:
  enum class Kind { InvalidCharacter, TooLong, WrongLength, OutOfRange };
  EncodingError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  enum class Kind { BadMagic, DimensionMismatch, TruncatedFile, Io };
  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class DataError : public Error {
 public:
  enum class Kind { BadFieldCount, NonBinaryPixel, BadLabel, BadRecordCount, Io, Format };
  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Training diverged; carries the phase/epoch/batch where it happened.
class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

}  // namespace tranet
