#ifndef FERROPUF_ERRORS_HPP
#define FERROPUF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ferropuf {

/// Invalid configuration (bad parameter value, malformed config file,
/// unknown key). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ferropuf

#endif
