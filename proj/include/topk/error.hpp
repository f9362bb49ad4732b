#pragma once

#include <stdexcept>
#include <string>

namespace topk {

/// Malformed input: bad spec, off-grid score, dangling entity id, etc.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The oracle could not answer a question.
class OracleError : public std::runtime_error {
public:
    explicit OracleError(const std::string& what, std::string raw_reply = {})
        : std::runtime_error(what), raw_reply_(std::move(raw_reply)) {}

    [[nodiscard]] const std::string& raw_reply() const noexcept { return raw_reply_; }

private:
    std::string raw_reply_;
};

}  // namespace topk
