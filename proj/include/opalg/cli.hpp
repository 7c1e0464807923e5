#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opalg::cli {

// Entry point shared by the binary and the in-process CLI tests. Reads the
// default input from `in`, writes the machine-readable document to `out` and
// human notes (timing) to `err`. Exit codes: 0 success, 1 negative verdict
// with certificate, 2 error or Unknown.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace opalg::cli
