#pragma once

#include <stdexcept>
#include <string>

namespace assouadlab {

// Every library failure is one of these. The CLI maps the kind to an exit code.
enum class ErrorKind {
    invalid_input,
    invalid_schedule,
    infeasible_schedule,
    insufficient_prefix,
    scale,
    not_applicable,
    retries_exhausted,
    spec,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) { return {ErrorKind::invalid_input, what}; }
inline Error scale_error(const std::string& what) { return {ErrorKind::scale, what}; }
inline Error spec_error(const std::string& what) { return {ErrorKind::spec, what}; }

} // namespace assouadlab
