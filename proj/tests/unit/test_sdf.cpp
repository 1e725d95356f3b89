#include <cstring>
#include <random>

#include "doctest.h"

#include "pforge/common/fileio.h"
#include "pforge/sdf/analytic.h"
#include "pforge/sdf/fitted.h"
#include "pforge/sdf/grid.h"
#include "support.h"

using namespace pforge;
using namespace pforge::sdf;

namespace {

PointCloud sphere_samples(std::mt19937_64& gen, std::size_t n, bool with_normals, Vec3 color = Vec3(0.2, 0.4, 0.6)) {
  PointCloud pc;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = testing::random_unit(gen);
    pc.positions.push_back(p);
    pc.colors.push_back(color);
    if (with_normals) pc.normals.push_back(p);
  }
  return pc;
}

}  // namespace

TEST_SUITE("sdf") {

TEST_CASE("analytic primitives") {
  const SphereSdf sphere(1.0);
  const FieldSample out = sphere.eval(Vec3(2, 0, 0));
  CHECK(out.distance == 1.0);
  CHECK(out.normal == Vec3(1, 0, 0));
  CHECK(sphere.distance(Vec3::Zero()) == -1.0);

  const TorusSdf torus(0.5, 0.2);
  CHECK(std::abs(torus.distance(Vec3(0.5, 0, 0.2))) < 1e-15);
  CHECK(torus.distance(Vec3::Zero()) == doctest::Approx(0.3));

  const BoxSdf box(Vec3(1, 2, 3));
  CHECK(box.distance(Vec3(2, 0, 0)) == doctest::Approx(1.0));
  CHECK(box.distance(Vec3::Zero()) == doctest::Approx(-1.0));
  CHECK(box.distance(Vec3(2, 3, 3)) == doctest::Approx(std::sqrt(2.0)));

  const CylinderSdf cyl(0.5, 1.0);
  CHECK(cyl.distance(Vec3(1, 0, 0)) == doctest::Approx(0.5));
  CHECK(cyl.distance(Vec3(0, 0, 1.5)) == doctest::Approx(0.5));

  const CapsuleSdf cap(Vec3(0, 0, 0), Vec3(1, 0, 0), 0.25);
  CHECK(cap.distance(Vec3(0.5, 1, 0)) == doctest::Approx(0.75));

  UnionSdf u({std::make_shared<SphereSdf>(0.5, Vec3(-1, 0, 0), Vec3(1, 0, 0)),
              std::make_shared<SphereSdf>(0.5, Vec3(1, 0, 0), Vec3(0, 1, 0))});
  CHECK(u.distance(Vec3(1.2, 0, 0)) == doctest::Approx(-0.3));
  CHECK(u.eval(Vec3(1.2, 0, 0)).color == Vec3(0, 1, 0));

  CHECK_THROWS(SphereSdf(0.0));
  CHECK_THROWS(TorusSdf(0.5, -0.1));
}

TEST_CASE("analytic fields are 1-Lipschitz with unit normals") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.2, 1.2), ue(1e-4, 0.1);
  std::vector<std::shared_ptr<const ScalarField>> fields{
      std::make_shared<SphereSdf>(0.7), std::make_shared<BoxSdf>(Vec3(0.8, 0.5, 0.6)),
      std::make_shared<TorusSdf>(0.7, 0.3, Vec3::Zero(), Axis::Y), std::make_shared<CylinderSdf>(0.55, 0.7),
      std::make_shared<CapsuleSdf>(Vec3(-0.5, 0, 0), Vec3(0.5, 0.2, 0), 0.3)};
  for (const auto& f : fields) {
    for (int i = 0; i < 2000; ++i) {
      const Vec3 x(u(gen), u(gen), u(gen));
      const Vec3 d = testing::random_unit(gen);
      const double eps = ue(gen);
      CHECK(std::abs(f->distance(x + eps * d) - f->distance(x)) <= eps * (1.0 + 1e-12));
      CHECK(std::abs(f->eval(x).normal.norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("analytic normal is the gradient away from the medial axis") {
  std::mt19937_64 gen(2);
  const TorusSdf torus(0.7, 0.3, Vec3::Zero(), Axis::Y);
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = testing::random_unit(gen) * 0.9 + Vec3(0, 0.05, 0);
    Vec3 g;
    for (int a = 0; a < 3; ++a)
      g[a] = (torus.distance(x + h * Vec3::Unit(a)) - torus.distance(x - h * Vec3::Unit(a))) / (2 * h);
    CHECK((g - torus.eval(x).normal).norm() < 1e-6);
  }
}

TEST_CASE("fitted sphere field") {
  std::mt19937_64 gen(3);
  const PointCloud pc = sphere_samples(gen, 2000, true);
  const FittedPointSdf f = fit_sdf(pc);
  int agree = 0, probes = 0;
  double worst_on = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 d = testing::random_unit(gen);
    worst_on = std::max(worst_on, std::abs(f.distance(d)));
    agree += f.distance(0.5 * d) < 0.0;
    agree += f.distance(1.5 * d) > 0.0;
    probes += 2;
  }
  CHECK(worst_on < 0.05);
  CHECK(agree == probes);
}

TEST_CASE("fitted field estimates missing normals") {
  std::mt19937_64 gen(4);
  const PointCloud pc = sphere_samples(gen, 2000, false);
  const FittedPointSdf f = fit_sdf(pc);
  CHECK(f.cloud().has_normals());
  int agree = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 d = testing::random_unit(gen);
    agree += (f.distance(0.5 * d) < 0.0) + (f.distance(1.5 * d) > 0.0);
  }
  CHECK(agree >= 990);
}

TEST_CASE("fitted plane patch is linear in height") {
  PointCloud pc;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      pc.positions.emplace_back(i * 0.05, j * 0.05, 0.0);
      pc.colors.push_back(Vec3(0.3, 0.3, 0.3));
      pc.normals.push_back(Vec3::UnitZ());
    }
  const FittedPointSdf f = fit_sdf(pc);
  for (double hgt : {-0.2, -0.05, 0.0, 0.03, 0.1, 0.25}) CHECK(f.distance(Vec3(0.01, -0.02, hgt)) == doctest::Approx(hgt).epsilon(1e-12));
  // Uniform color everywhere.
  CHECK((f.eval(Vec3(0.3, 0.9, -0.4)).color - Vec3(0.3, 0.3, 0.3)).norm() < 1e-15);
}

TEST_CASE("fit_sdf rejects tiny or empty clouds") {
  std::mt19937_64 gen(5);
  CHECK_THROWS_WITH(fit_sdf(PointCloud{}), "pointcloud: empty");
  CHECK_THROWS(fit_sdf(sphere_samples(gen, kMinFitPoints - 1, true)));
  CHECK_NOTHROW(fit_sdf(sphere_samples(gen, kMinFitPoints, true)));
}

TEST_CASE("constant field grid is all positive") {
  const GridSamples g = sample_grid(ConstantField(1.0), 8);
  CHECK(g.sdf.size() == 9 * 9 * 9);
  for (double v : g.sdf) CHECK(v == 1.0);
  CHECK_THROWS(sample_grid(ConstantField(1.0), 7));
}

TEST_CASE("sphere grid sign changes straddle the radius") {
  const SphereSdf sphere(0.8);
  const GridSamples g = sample_grid(sphere, 32);
  const Lattice& L = g.lattice;
  CHECK(L.position(0, 0, 0) == Vec3(-1.1, -1.1, -1.1));
  CHECK(L.position(32, 32, 32).isApprox(Vec3(1.1, 1.1, 1.1)));
  const double h = L.cell_size();
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        bool neg = false, pos = false;
        double rmin = 1e9, rmax = 0.0;
        for (int c = 0; c < 8; ++c) {
          const std::size_t v = L.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          (g.sdf[v] < 0 ? neg : pos) = true;
          const double r = L.position(v).norm();
          rmin = std::min(rmin, r);
          rmax = std::max(rmax, r);
        }
        // A cell changes sign exactly when its corner radii bracket 0.8.
        CHECK((neg && pos) == (rmin < 0.8 && rmax >= 0.8));
        if (neg && pos) CHECK(rmax - rmin <= std::sqrt(3.0) * h + 1e-12);
      }
}

TEST_CASE("grid sampling reports non-finite values") {
  class NanField final : public ScalarField {
   public:
    FieldSample eval(const Vec3& x) const override {
      return {x.x() > 0.5 ? std::nan("") : 1.0, Vec3::Ones(), Vec3::UnitZ()};
    }
  };
  CHECK_THROWS_AS(sample_grid(NanField(), 8), std::runtime_error);
}

TEST_CASE("grid sampling is order independent") {
  std::mt19937_64 gen(6);
  const FittedPointSdf f = fit_sdf(sphere_samples(gen, 500, true));
  const GridSamples a = sample_grid(f, 24);
  const GridSamples b = sample_grid(f, 24);
  CHECK(a.sdf == b.sdf);
  CHECK(a.color == b.color);
  // Serial evaluation in reverse order gives the same arrays.
  for (std::size_t v = a.sdf.size(); v-- > 0;) {
    const FieldSample s = f.eval(a.lattice.position(v));
    CHECK(s.distance == a.sdf[v]);
    CHECK(s.color == a.color[v]);
  }
}

TEST_CASE("grid dump layout") {
  testing::TempDir dir("grid");
  const GridSamples g = sample_grid(SphereSdf(0.5), 8);
  write_grid_dump(dir / "g.bin", g);
  const std::string bytes = read_file(dir / "g.bin");
  REQUIRE(bytes.size() == 4 + 8 + 4 * 729);
  std::int32_t res;
  double bound;
  float first;
  std::memcpy(&res, bytes.data(), 4);
  std::memcpy(&bound, bytes.data() + 4, 8);
  std::memcpy(&first, bytes.data() + 12, 4);
  CHECK(res == 8);
  CHECK(bound == 1.1);
  CHECK(first == static_cast<float>(g.sdf[0]));
}

}
