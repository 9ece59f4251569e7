#ifndef DATACURE_UTIL_HPP
#define DATACURE_UTIL_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace datacure {

// --- errors ---------------------------------------------------------------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    BackendError(const std::string& msg, bool retryable, int attempts)
        : Error(msg), retryable(retryable), attempts(attempts) {}
    bool retryable = false;
    int attempts = 1;
};

// --- stable hashing -------------------------------------------------------
// std::hash is not pinned across platforms; everything seeded (cache keys,
// simulated draws, noise injection) goes through these instead.

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);

// Hash of several parts with separators, then finalized. Order-sensitive.
std::uint64_t stable_hash(std::initializer_list<std::string_view> parts,
                          std::uint64_t seed = 0);

// Deterministic double in [0, 1) from hashed parts.
double hash01(std::initializer_list<std::string_view> parts, std::uint64_t seed);

std::string to_hex(std::uint64_t v, int digits = 16);

// Deterministic RNG helpers over std::mt19937_64 (the engine itself is
// specified by the standard; the distributions are not, so we roll our own).
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    double next01() { return (engine_() >> 11) * 0x1.0p-53; }
    // Uniform in [0, bound), bound >= 1, via rejection sampling.
    std::uint64_t bounded(std::uint64_t bound);
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// --- string helpers -------------------------------------------------------

std::string_view trim_view(std::string_view s);
std::string to_lower(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Replaces every "{name}" slot with its value; throws ConfigError on a slot
// left unfilled so template overrides fail loudly.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& slots);

// --- bounded parallel execution --------------------------------------------
// Runs fn(0..n-1) on at most `concurrency` threads. Results must be written
// to index-addressed storage by the caller; the first exception thrown by a
// task is rethrown after all threads join.
void parallel_for(std::size_t n, int concurrency, const std::function<void(std::size_t)>& fn);

}  // namespace datacure

#endif
