#pragma once

namespace catex {

// Full command-line front end: generate / train / rollout / ablate / bench /
// render subcommands over one JSON experiment config. Returns the process
// exit code; prints a one-line `error: ...` diagnostic to stderr on failure.
int run_cli(int argc, char** argv);

}  // namespace catex
