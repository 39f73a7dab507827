#pragma once

// Command-line front end. run() is the whole program minus process setup so
// that tests can drive it with argument vectors and string streams.

#include <complex>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace macroreal::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "a:b:step" (inclusive), "a,b,c" or a single number.
std::vector<double> parse_range(const std::string& text);
/// "0.3", "0.3i", "-i", "0.1+0.1i", "1e-3-2i".
std::complex<double> parse_complex(const std::string& text);

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Results must be
/// written by index so output order never depends on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace macroreal::cli
