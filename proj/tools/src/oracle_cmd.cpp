#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "common.hpp"
#include "znnqp/csv.hpp"
#include "znnqp/errors.hpp"
#include "znnqp/oracle.hpp"

namespace znnqp::app {

int cmd_oracle(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg) {
  return detail::guarded(config, opts, msg, [&](const Experiment& ex, const std::filesystem::path& dir) {
    if (ex.problem == ProblemKind::Robot) {
      throw ConfigError("problem: the robot QP depends on the joint path; sample it through track");
    }
    const TimeVariantQP problem = build_problem(ex);
    const QpDims d = problem.dims();
    const SolutionPath path = solution_path(problem, ex.grid.points());
    for (std::size_t i : path.switches) {
      msg << fmt::format("warning: active set changes between t = {} and t = {}\n",
                         path.solutions[i - 1].t, path.solutions[i].t);
    }

    detail::ensure_dir(dir);
    std::ofstream f(dir / kOracleCsv, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / kOracleCsv).string());
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 1; i <= d.n; ++i) header.push_back(fmt::format("x{}", i));
    for (Eigen::Index i = 1; i <= d.m; ++i) header.push_back(fmt::format("phi{}", i));
    for (Eigen::Index i = 1; i <= d.p; ++i) header.push_back(fmt::format("varphi{}", i));
    header.emplace_back("active_mask");
    CsvWriter w(f, header);
    for (const auto& s : path.solutions) {
      std::vector<std::string> row{format_real(s.t)};
      for (Eigen::Index i = 0; i < d.n; ++i) row.push_back(format_real(s.x_star[i]));
      for (Eigen::Index i = 0; i < d.m; ++i) row.push_back(format_real(s.phi_star[i]));
      for (Eigen::Index i = 0; i < d.p; ++i) row.push_back(format_real(s.varphi_star[i]));
      std::uint32_t mask = 0;
      for (int j : s.active_set) mask |= 1u << j;
      row.push_back(std::to_string(mask));
      w.row(row);
    }
    msg << fmt::format("wrote {} rows to {}\n", path.solutions.size(), (dir / kOracleCsv).string());
    return kExitOk;
  });
}

}  // namespace znnqp::app
