#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "znnqp/app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Predefined-time neural dynamics for time-variant quadratic programs"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "experiment config file")->required();
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    return sub;
  };
  auto* bench = add("bench", "run the model comparison on a QP benchmark");
  auto* track = add("track", "run closed-loop manipulator tracking");
  auto* oracle = add("oracle", "sample the exact KKT solution on a time grid");
  auto* verify = add("verify", "recompute summaries from per-run CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : znnqp::app::kExitConfig;
  }

  znnqp::app::CommandOptions opts;
  if (!out.empty()) opts.out_dir = out;

  if (bench->parsed()) return znnqp::app::cmd_bench(config, opts, std::cout);
  if (track->parsed()) return znnqp::app::cmd_track(config, opts, std::cout);
  if (oracle->parsed()) return znnqp::app::cmd_oracle(config, opts, std::cout);
  if (verify->parsed()) return znnqp::app::cmd_verify(config, opts, std::cout);
  return znnqp::app::kExitConfig;
}
