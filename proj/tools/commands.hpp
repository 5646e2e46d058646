#pragma once

#include <iosfwd>

namespace fdce::cli {

// Exit codes: 0 ok, 1 usage error, 2 solver warnings / failed verdict.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fdce::cli
