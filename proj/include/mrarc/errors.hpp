#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrarc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MRARC_DEFINE_ERROR(Name)        \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

MRARC_DEFINE_ERROR(DimensionMismatch);
MRARC_DEFINE_ERROR(NotSPD);
MRARC_DEFINE_ERROR(NonFinite);
MRARC_DEFINE_ERROR(ShapeMismatch);
MRARC_DEFINE_ERROR(NonPositiveGamma);
MRARC_DEFINE_ERROR(InvalidArgument);
MRARC_DEFINE_ERROR(UnsupportedKernel);
MRARC_DEFINE_ERROR(EmptyInput);
MRARC_DEFINE_ERROR(IndexOutOfRange);
MRARC_DEFINE_ERROR(InconsistentModalities);
MRARC_DEFINE_ERROR(EmptyQuerySet);
MRARC_DEFINE_ERROR(InvalidSpec);
MRARC_DEFINE_ERROR(GeometryMismatch);
MRARC_DEFINE_ERROR(MagicMismatch);
MRARC_DEFINE_ERROR(IoError);
MRARC_DEFINE_ERROR(ConfigError);

#undef MRARC_DEFINE_ERROR

/// Malformed input file. `line` is 1-based for text formats; `offset` is a
/// byte offset for binary formats. Whichever does not apply is zero.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error(what), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

}  // namespace mrarc
