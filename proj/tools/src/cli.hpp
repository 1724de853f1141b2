#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subpop::cli {

/// Runs one subcommand. Returns 0 on success, 2 on usage errors and 1 on
/// data or numeric errors; messages go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subpop::cli
