#include <chrono>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "common.hpp"
#include "znnqp/csv.hpp"
#include "znnqp/errors.hpp"
#include "znnqp/oracle.hpp"

namespace znnqp::app {

namespace {

// Separates the perturbation stream from the per-step noise streams of the same seed.
constexpr std::uint64_t kInitStream = 0x696e6974ULL;

const std::vector<std::string> kSummaryHeader{"model", "noise", "alpha", "seed", "t_c", "res_at_tc",
                                              "res_steady_max", "runtime_ms", "status", "csv"};

}  // namespace

Vec initial_state(const TimeVariantQP& problem, double t, double radius, std::uint64_t seed) {
  Vec y = solve_at(problem, t).y();
  if (radius > 0) {
    const Vec u = seeded_uniform(seed, kInitStream, static_cast<std::size_t>(y.size()));
    const double norm = u.norm();
    if (norm > 0) y += (radius / norm) * u;
  }
  return y;
}

std::vector<BenchRow> run_bench(const Experiment& ex, const std::optional<std::filesystem::path>& out,
                                std::ostream& msg) {
  if (ex.models.empty()) throw ConfigError("models: list is empty");
  const TimeVariantQP problem = build_problem(ex);
  const QpDims dims = problem.dims();
  if (out) detail::ensure_dir(*out);

  std::vector<BenchRow> rows;
  for (const auto& entry : ex.models) {
    for (double alpha : entry.alphas) {
      for (const auto& sc : ex.noises) {
        for (std::uint64_t seed : ex.seeds) {
          BenchRow row;
          row.spec = entry.spec(alpha, sc.channel.inf_bound());
          row.noise = sc.name;
          row.seed = seed;
          row.csv = fmt::format("{}-{}-s{}.csv", detail::model_file_stem(row.spec), slug(sc.name), seed);

          RunConfig cfg;
          cfg.dt = ex.dt;
          cfg.t_end = ex.t_end;
          cfg.model = row.spec;
          cfg.noise = sc.channel.resized(dims.total()).reseeded(seed);
          cfg.record_every = ex.record_every;
          cfg.diagnostics.lyapunov = ex.lyapunov;
          cfg.y0 = KktState(dims, initial_state(problem, cfg.t_start(), ex.init_radius, seed), cfg.t_start());

          const auto t0 = std::chrono::steady_clock::now();
          try {
            row.log = integrate(problem, cfg);
            row.status = "ok";
          } catch (const NumericalBlowup& e) {
            row.log = e.partial_log();
            row.status = "blowup";
            msg << "warning: " << e.what() << '\n';
          }
          row.runtime_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
          row.res_at_tc = row.log.residual_at(row.spec.t_c);
          row.res_steady_max = row.log.max_residual(row.spec.t_c, ex.t_end);
          if (out) row.log.write_csv(*out / row.csv);
          rows.push_back(std::move(row));
        }
      }
    }
  }

  if (out) {
    std::ofstream f(*out / kBenchSummary, std::ios::binary);
    if (!f) throw Error("cannot write " + (*out / kBenchSummary).string());
    CsvWriter w(f, kSummaryHeader);
    for (const auto& r : rows) {
      w.row(std::vector<std::string>{std::string(to_string(r.spec.kind)), r.noise, detail::alpha_cell(r.spec),
                                     std::to_string(r.seed), format_real(r.spec.t_c), format_real(r.res_at_tc),
                                     format_real(r.res_steady_max), fmt::format("{:.3f}", r.runtime_ms),
                                     r.status, r.csv});
    }
  }
  return rows;
}

int cmd_bench(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg) {
  return detail::guarded(config, opts, msg, [&](const Experiment& ex, const std::filesystem::path& dir) {
    if (ex.problem == ProblemKind::Robot) throw ConfigError("problem: bench needs builtin-eq25 or static");
    const auto rows = run_bench(ex, dir, msg);
    bool blowup = false;
    for (const auto& r : rows) {
      msg << fmt::format("{:<22} {:<10} res(t_c) = {:.3e}  steady max = {:.3e}  {:.1f} ms  {}\n",
                         r.spec.label(), r.noise, r.res_at_tc, r.res_steady_max, r.runtime_ms, r.status);
      blowup = blowup || r.status != "ok";
    }
    msg << "wrote " << (dir / kBenchSummary).string() << '\n';
    return blowup ? kExitNumerical : kExitOk;
  });
}

}  // namespace znnqp::app
