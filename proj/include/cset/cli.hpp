#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cset {

// CLI entry point. Returns 0 on success, 2 on validation errors, 3 when a
// solver produced no output branch. Diagnostics go to `err`, tables to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cset
