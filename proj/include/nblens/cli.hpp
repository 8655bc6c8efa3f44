#pragma once

namespace nblens {

// Entry point behind tools/main.cpp. Returns the process exit code; every
// module error surfaces as one machine-readable JSON line on stderr.
int cli_run(int argc, char** argv);

}  // namespace nblens
