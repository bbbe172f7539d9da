#pragma once

#include <iosfwd>

namespace soccerseq::cli {

/// Entry point behind the `soccerseq` executable. Returns the process exit
/// status; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace soccerseq::cli
