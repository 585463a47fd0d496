#pragma once

#include <string>

#include "config.hpp"

namespace metastate::cli {

struct CommandContext {
  RunConfig config;
  std::string out_dir = ".";
  int workers = 0;
};

void cmd_solve(const CommandContext& ctx);
void cmd_metastate(const CommandContext& ctx);
void cmd_scan(const CommandContext& ctx);
void cmd_simulate(const CommandContext& ctx);
void cmd_plotdata(const CommandContext& ctx);

}  // namespace metastate::cli
