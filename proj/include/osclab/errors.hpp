#pragma once

#include <stdexcept>
#include <string>

namespace osclab {

/// Raised when an input violates a documented precondition (r < 1, #I < 2,
/// a non-increasing sequence, an out-of-range level, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when an input file or config cannot be parsed.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for invalid experiment settings (maps to the usage exit code).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Fault injection for negative controls.
///
/// The verification battery must be able to prove that it notices a broken
/// kernel. A ScopedMutation switches one of the production kernels into a
/// known-wrong mode for the current thread only; nothing else reads this state.
namespace fault {

enum class Mutation {
    none,
    block_boundary,   // boxes become closed on the right: [I_j, I_{j+1}]
    non_strict,       // increasing sequences accept equal coordinates
    empty_sup,        // empty box contributes |a_{I_{j+1}} - a_{I_j}|^r instead of 0
};

inline Mutation& active() {
    thread_local Mutation m = Mutation::none;
    return m;
}

class ScopedMutation {
public:
    explicit ScopedMutation(Mutation m) : saved_(active()) { active() = m; }
    ~ScopedMutation() { active() = saved_; }
    ScopedMutation(const ScopedMutation&) = delete;
    ScopedMutation& operator=(const ScopedMutation&) = delete;

private:
    Mutation saved_;
};

inline const char* to_string(Mutation m) {
    switch (m) {
        case Mutation::none: return "none";
        case Mutation::block_boundary: return "block_boundary";
        case Mutation::non_strict: return "non_strict";
        case Mutation::empty_sup: return "empty_sup";
    }
    return "none";
}

inline Mutation parse_mutation(const std::string& s) {
    if (s.empty() || s == "none") return Mutation::none;
    if (s == "block_boundary") return Mutation::block_boundary;
    if (s == "non_strict") return Mutation::non_strict;
    if (s == "empty_sup") return Mutation::empty_sup;
    throw FormatError("unknown mutation '" + s + "'");
}

}  // namespace fault
}  // namespace osclab
