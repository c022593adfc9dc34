#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "settings.hpp"

namespace bdc::cli {

struct Context {
  Settings settings;    ///< config file overlaid with flags
  std::string version;  ///< software version for manifests
  bool quiet = false;
};

int cmd_simulate(const Context &ctx);
int cmd_hyper(const Context &ctx);
int cmd_fit(const Context &ctx);
int cmd_score(const Context &ctx, const std::vector<std::filesystem::path> &batch);
int cmd_summarize(const Context &ctx);

} // namespace bdc::cli
