#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qdn {

/// Position inside a `.qdn` document. Line and column are 1-based.
struct SourceLocation {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;

  std::string to_string() const;
};

/// Base class for every error raised by the engine.
///
/// Errors raised while reading a network description carry the location of
/// the offending token; errors raised by pure numerical code do not.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  Error(const std::string& what, SourceLocation where)
      : std::runtime_error(what), location_(std::move(where)) {}

  const std::optional<SourceLocation>& location() const noexcept { return location_; }
  /// Attaches a location to an error raised below the parser.
  void set_location(SourceLocation where) { location_ = std::move(where); }
  virtual const char* kind() const noexcept { return "Error"; }

 private:
  std::optional<SourceLocation> location_;
};

#define QDN_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    using Error::Error;                                             \
    const char* kind() const noexcept override { return #Name; }    \
  }

// register / signal
QDN_DEFINE_ERROR(RankError);
QDN_DEFINE_ERROR(NormalizationError);
QDN_DEFINE_ERROR(ZeroNormError);
QDN_DEFINE_ERROR(NilpotencyError);

// evolution
QDN_DEFINE_ERROR(DimensionError);
QDN_DEFINE_ERROR(UndefinedTransitionError);

// optics / physics
QDN_DEFINE_ERROR(ParamError);

// network
QDN_DEFINE_ERROR(CycleError);
QDN_DEFINE_ERROR(WiringError);
QDN_DEFINE_ERROR(NameError);

// dsl
QDN_DEFINE_ERROR(SyntaxError);
QDN_DEFINE_ERROR(UnknownModuleError);
QDN_DEFINE_ERROR(ArityError);
QDN_DEFINE_ERROR(LiteralError);

// files
QDN_DEFINE_ERROR(IoError);

#undef QDN_DEFINE_ERROR

}  // namespace qdn
