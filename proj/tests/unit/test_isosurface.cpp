#include <random>

#include "doctest.h"

#include "pforge/isosurface/marching_tets.h"
#include "pforge/isosurface/mesh_io.h"
#include "pforge/sdf/analytic.h"
#include "support.h"

using namespace pforge;
using namespace pforge::iso;

namespace {

TetGrid grid_of(const sdf::ScalarField& f, int res) { return TetGrid(sdf::sample_grid(f, res)); }

int expected_triangles(int negatives) { return negatives == 0 || negatives == 4 ? 0 : (negatives == 2 ? 2 : 1); }

}  // namespace

TEST_SUITE("isosurface") {

TEST_CASE("crossing parameter conventions") {
  CHECK(crossing_parameter(-1.0, 1.0) == 0.5);
  CHECK(crossing_parameter(0.0, 0.0) == 0.5);
  CHECK(crossing_parameter(-1.0, 3.0) == 0.25);
  const Vec3 v = crossing_position(Vec3(0, 0, 0), Vec3::Zero(), -1.0, Vec3(2, 0, 0), Vec3::Zero(), 1.0);
  CHECK(v == Vec3(1, 0, 0));
  const Vec3 w = crossing_position(Vec3(0, 0, 0), Vec3(0, 1, 0), -1.0, Vec3(2, 0, 0), Vec3(0, 1, 0), 1.0);
  CHECK(w == Vec3(1, 1, 0));
}

TEST_CASE("edge jacobian structure and finite differences") {
  const Vec3 pa(0.1, -0.2, 0.3), pb(0.15, -0.2, 0.33), oa(0.01, 0.0, -0.01), ob(-0.005, 0.002, 0.0);
  const EdgeJacobian j = vertex_position_jacobian(pa, oa, -1.0, pb, ob, 1.0);
  CHECK(j.tau == 0.5);
  CHECK(j.d_oa.isApprox(0.5 * Eigen::Matrix3d::Identity()));
  CHECK(j.d_ob.isApprox(0.5 * Eigen::Matrix3d::Identity()));
  CHECK(j.d_sa.norm() == doctest::Approx(j.d_sb.norm()));
  const double h = 1e-4;
  const Vec3 fd = (crossing_position(pa, oa, -1.0 + h, pb, ob, 1.0) - crossing_position(pa, oa, -1.0 - h, pb, ob, 1.0)) /
                  (2 * h);
  CHECK((fd - j.d_sa).norm() / j.d_sa.norm() < 1e-4);

  const EdgeJacobian k = vertex_position_jacobian(pa, oa, -0.3, pb, ob, 0.9);
  CHECK(k.d_oa.isApprox((1.0 - k.tau) * Eigen::Matrix3d::Identity()));
  CHECK_THROWS(vertex_position_jacobian(pa, oa, 0.3, pb, ob, 0.9));
  CHECK_THROWS(vertex_position_jacobian(pa, oa, 0.0, pb, ob, 0.9));
}

TEST_CASE("tets are positively oriented and tile the cube") {
  const TetGrid g = grid_of(sdf::ConstantField(1.0), 8);
  CHECK(g.tet_count() == 8 * 8 * 8 * 6);
  double volume = 0.0;
  for (std::size_t t = 0; t < g.tet_count(); ++t) {
    const auto v = g.tet(t);
    const Vec3 a = g.vertex_position(v[0]);
    const double det = (g.vertex_position(v[1]) - a).dot((g.vertex_position(v[2]) - a).cross(g.vertex_position(v[3]) - a));
    CHECK(det > 0.0);
    volume += det / 6.0;
  }
  CHECK(volume == doctest::Approx(std::pow(2.2, 3)).epsilon(1e-12));
}

TEST_CASE("triangle count per tet follows the case table") {
  std::mt19937_64 gen(1);
  TetGrid g = grid_of(sdf::ConstantField(1.0), 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& s : g.mutable_sdf()) {
    do s = u(gen);
    while (s == 0.0);
  }
  std::size_t expected = 0;
  for (std::size_t t = 0; t < g.tet_count(); ++t) {
    int neg = 0;
    for (std::size_t v : g.tet(t)) neg += g.sdf()[v] < 0.0;
    expected += expected_triangles(neg);
  }
  CHECK(extract_triangle_soup(g).triangle_count() == expected);
}

TEST_CASE("single negative vertex closes into a small sphere-like surface") {
  TetGrid g = grid_of(sdf::ConstantField(1.0), 8);
  const std::size_t v = g.lattice().index(4, 4, 4);
  g.mutable_sdf()[v] = -1.0;
  WeldReport report;
  const TriMesh m = marching_tets(g, &report);
  CHECK(m.face_count() == 24);  // one triangle per incident tet of the Kuhn split
  CHECK(euler_characteristic(m) == 2);
  CHECK(report.boundary_edges == 0);
  for (const Vec3& p : m.positions) CHECK((p - g.lattice().position(v)).norm() <= 0.5 * std::sqrt(3.0) * g.lattice().cell_size() + 1e-12);
}

TEST_CASE("constant field and empty soup give an empty mesh") {
  CHECK(marching_tets(grid_of(sdf::ConstantField(1.0), 8)).empty());
  CHECK(marching_tets(grid_of(sdf::ConstantField(-1.0), 8)).empty());
  CHECK(weld_and_orient(TriangleSoup{}).empty());
}

TEST_CASE("non-finite grid is rejected") {
  TetGrid g = grid_of(sdf::ConstantField(1.0), 8);
  g.mutable_sdf()[10] = std::nan("");
  CHECK_THROWS(marching_tets(g));
}

TEST_CASE("sphere and torus topology") {
  WeldReport rs, rt;
  const TriMesh s = marching_tets(grid_of(sdf::SphereSdf(0.7), 32), &rs);
  CHECK(euler_characteristic(s) == 2);
  CHECK(rs.boundary_edges == 0);
  CHECK(rs.nonmanifold_edges == 0);
  const EdgeTopology topo = edge_topology(s);
  CHECK(topo.boundary_edges == 0);
  CHECK(topo.edges * 2 == s.face_count() * 3);

  const TriMesh t = marching_tets(grid_of(sdf::TorusSdf(0.6, 0.25, Vec3::Zero(), sdf::Axis::Y), 32), &rt);
  CHECK(euler_characteristic(t) == 0);
  CHECK(rt.boundary_edges == 0);
}

TEST_CASE("sphere vertices lie within a cell of the surface and face outward") {
  const TetGrid g = grid_of(sdf::SphereSdf(0.7), 32);
  const TriMesh m = marching_tets(g);
  const double h = g.lattice().cell_size();
  for (const Vec3& p : m.positions) CHECK(std::abs(p.norm() - 0.7) < h);
  double signed_volume = 0.0;
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    const auto& tri = m.indices[f];
    signed_volume += m.positions[tri[0]].dot(m.positions[tri[1]].cross(m.positions[tri[2]])) / 6.0;
    CHECK(face_normal_unnormalized(m, f).dot(m.positions[tri[0]]) > 0.0);
  }
  CHECK(signed_volume == doctest::Approx(4.0 / 3.0 * M_PI * 0.343).epsilon(0.02));
  for (const Vec3& n : m.normals) CHECK(std::abs(n.norm() - 1.0) < 1e-9);
}

TEST_CASE("uniform offsets translate the mesh") {
  TetGrid g = grid_of(sdf::SphereSdf(0.6, Vec3(0.1, 0, 0)), 24);
  const TriMesh before = marching_tets(g);
  const Vec3 d = Vec3(0.3, -0.2, 0.1) * g.lattice().cell_size();
  g.set_offsets(std::vector<Vec3>(g.vertex_count(), d));
  const TriMesh after = marching_tets(g);
  REQUIRE(after.vertex_count() == before.vertex_count());
  CHECK(after.indices == before.indices);
  for (std::size_t i = 0; i < before.vertex_count(); ++i) CHECK((after.positions[i] - before.positions[i] - d).norm() < 1e-12);
}

TEST_CASE("offsets are clamped to a fraction of the cell") {
  TetGrid g = grid_of(sdf::ConstantField(1.0), 8);
  g.set_offset(3, Vec3(10, 0, 0));
  CHECK(g.offsets()[3].norm() == doctest::Approx(g.max_offset()));
  CHECK(g.max_offset() == doctest::Approx(0.45 * 2.2 / 8));
  CHECK_THROWS(g.set_offsets(std::vector<Vec3>(5)));
}

TEST_CASE("attributes interpolate with the crossing parameter") {
  TetGrid g = grid_of(sdf::SphereSdf(0.5, Vec3::Zero(), Vec3(0.25, 0.5, 0.75)), 16);
  const TriMesh m = marching_tets(g);
  for (const Vec3& c : m.colors) CHECK((c - Vec3(0.25, 0.5, 0.75)).norm() < 1e-14);
}

TEST_CASE("obj round trip and polygon faces") {
  const TriMesh m = marching_tets(grid_of(sdf::SphereSdf(0.5), 12));
  const TriMesh back = read_obj(write_obj(m));
  REQUIRE(back.vertex_count() == m.vertex_count());
  CHECK(back.indices == m.indices);
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    CHECK((back.positions[i] - m.positions[i]).norm() < 1e-12);
    CHECK((back.colors[i] - m.colors[i]).norm() < 1e-12);
  }
  const TriMesh quad = read_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  CHECK(quad.face_count() == 2);
  CHECK(surface_area(quad) == doctest::Approx(1.0));
  CHECK(quad.normals[0].isApprox(Vec3::UnitZ()));
  const TriMesh slashes = read_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2/1/1 3/1/1\n");
  CHECK(slashes.face_count() == 1);
  CHECK_THROWS(read_obj("v 0 0 0\nf 1 2 3\n"));
  CHECK_THROWS(read_obj("v 0 zero 0\n"));
}

TEST_CASE("mesh ply header lists faces") {
  const TriMesh m = marching_tets(grid_of(sdf::SphereSdf(0.5), 8));
  const std::string ply = write_mesh_ply(m);
  CHECK(ply.rfind("ply\nformat binary_little_endian 1.0\n", 0) == 0);
  CHECK(ply.find("element vertex " + std::to_string(m.vertex_count())) != std::string::npos);
  CHECK(ply.find("element face " + std::to_string(m.face_count())) != std::string::npos);
}

TEST_CASE("mesh validation and topology helpers") {
  TriMesh m;
  m.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.indices = {{0, 1, 2}};
  CHECK_NOTHROW(m.validate());
  CHECK(triangle_area(m, 0) == doctest::Approx(0.5));
  CHECK(edge_topology(m).boundary_edges == 3);
  CHECK(euler_characteristic(m) == 1);
  m.indices = {{0, 1, 3}};
  CHECK_THROWS(m.validate());
}

}
