#pragma once

// Command-line front end. Subcommands: classify, evolve, boundary, figure,
// verify. Exit codes: 0 success, 1 verification failure, 2 usage or domain
// error, 3 I/O error.

#include <iosfwd>
#include <string>
#include <vector>

namespace cvsep::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kDomainError = 2, kIoError = 3 };

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvsep::cli
