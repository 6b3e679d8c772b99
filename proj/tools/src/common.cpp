#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "znnqp/errors.hpp"
#include "znnqp/integrator.hpp"

namespace znnqp::app::detail {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(fmt::format("CSV has no column '{}'", name));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot read {}", path.string()));
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw Error(fmt::format("{}: row {} has {} cells, header has {}", path.string(),
                                t.rows.size() + 1, cells.size(), t.header.size()));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

double parse_real(const std::string& cell) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') throw Error(fmt::format("not a number: '{}'", cell));
  return v;
}

std::filesystem::path output_dir(const Experiment& ex, const CommandOptions& opts) {
  return opts.out_dir ? *opts.out_dir : ex.output_dir;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

std::string alpha_cell(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::FO_GNN:
    case ModelKind::PTC_FOZNN:
    case ModelKind::SPTC_AN_FOZNN:
      return fmt::format("{}", spec.alpha);
    default:
      return "na";
  }
}

std::string model_file_stem(const ModelSpec& spec) {
  std::string s = slug(std::string(to_string(spec.kind)));
  const std::string a = alpha_cell(spec);
  if (a != "na") s += "-a" + a;
  return s;
}

int guarded(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg,
            const std::function<int(const Experiment&, const std::filesystem::path&)>& body) {
  try {
    const Experiment ex = load_experiment(config);
    return body(ex, output_dir(ex, opts));
  } catch (const ConfigError& e) {
    msg << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Infeasible& e) {
    msg << "infeasible at t = " << e.time() << ": " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const IllPosed& e) {
    msg << "ill-posed at t = " << e.time() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalBlowup& e) {
    msg << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    msg << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace znnqp::app::detail
