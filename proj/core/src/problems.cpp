#include "znnqp/problems.hpp"

#include <cmath>

namespace znnqp {

TimeVariantQP benchmark_problem() {
  const QpDims dims{2, 1, 4};
  return TimeVariantQP(dims, [](double t) {
    const double s1 = std::sin(t), c1 = std::cos(t);
    const double s3 = std::sin(3 * t), c3 = std::cos(3 * t);
    const double s4 = std::sin(4 * t), c4 = std::cos(4 * t);

    QpSample out;
    out.t = t;
    QpData& v = out.value;
    QpData& r = out.rate;

    v.H.resize(2, 2);
    v.H << s1 / 4 + 1, c1 / 2,
           c1 / 2, c1 / 4 + 1;
    r.H.resize(2, 2);
    r.H << c1 / 4, -s1 / 2,
           -s1 / 2, -s1 / 4;

    v.rho = Vec{{c3, s3}};
    r.rho = Vec{{-3 * s3, 3 * c3}};

    v.A = Mat{{c4, s4}};
    r.A = Mat{{-4 * s4, 4 * c4}};

    v.b = Vec{{std::sin(2 * t)}};
    r.b = Vec{{2 * std::cos(2 * t)}};

    v.C.resize(4, 2);
    v.C << Mat::Identity(2, 2), -Mat::Identity(2, 2);
    r.C = Mat::Zero(4, 2);

    v.d = Vec::Constant(4, kBenchmarkBox);
    r.d = Vec::Zero(4);
    return out;
  });
}

}  // namespace znnqp
