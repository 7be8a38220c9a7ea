#include <cmath>

#include "romassim/harness/benchmark.hpp"
#include "support.hpp"

namespace romassim {
namespace {

using namespace romassim::testing;
using fields::Reduction;

TEST(Mesh, SingleCell) {
  const auto m = make_mesh(1, 1, 1.0, 1.0);
  EXPECT_EQ(m->size(), 1u);
  EXPECT_DOUBLE_EQ(m->total_area(), 1.0);
}

TEST(Mesh, HalfRegionCount) {
  fields::MeshDescription d;
  d.mask.nx = 10;
  d.mask.ny = 10;
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t i = 0; i < 10; ++i) d.mask.ids.push_back(i < 5 ? 1 : 2);
  const auto m = fields::build_mesh(d);
  EXPECT_EQ(m.region_cell_count(1), 50u);
  EXPECT_DOUBLE_EQ(m.region_area(1), 50.0);
}

TEST(Mesh, IaeaOctantGrid) {
  const auto bc = harness::load_case(config_path("iaea2d.json"));
  const auto& m = *bc.model.mesh;
  EXPECT_EQ(m.nx(), 85u);
  EXPECT_EQ(m.ny(), 85u);
  EXPECT_DOUBLE_EQ(m.dx(), 2.0);
  EXPECT_EQ(m.region_ids().size(), 4u);
  std::size_t total = 0;
  for (int id : m.region_ids()) total += m.region_cell_count(id);
  EXPECT_EQ(total, m.size());
}

TEST(Mesh, CellCentersAndRefinement) {
  fields::MeshDescription d;
  d.mask = fields::parse_region_mask("1 2\n3 4\n");
  d.mask_dx = 10.0;
  d.mask_dy = 10.0;
  d.refine = 2;
  d.x0 = 5.0;
  const auto m = fields::build_mesh(d);
  EXPECT_EQ(m.nx(), 4u);
  EXPECT_DOUBLE_EQ(m.x_center(0), 7.5);
  EXPECT_DOUBLE_EQ(m.y_center(3), 17.5);
  // First text line is the bottom row.
  EXPECT_EQ(m.region(m.index(0, 0)), 1);
  EXPECT_EQ(m.region(m.index(3, 3)), 4);
}

TEST(Mesh, Errors) {
  EXPECT_EQ(error_code_of([] { fields::uniform_mesh(0, 3, 1.0, 1.0, 1, all_sides(BoundaryTag::Symmetry)); }),
            ErrorCode::ZeroDimension);
  fields::MeshDescription d;
  d.mask = fields::parse_region_mask("1 0\n1 1\n");
  EXPECT_EQ(error_code_of([&] { fields::build_mesh(d); }), ErrorCode::RegionGap);
}

TEST(Mesh, EveryEdgeTagged) {
  const auto m = make_mesh(3, 2, 1.0, 1.0, {BoundaryTag::Symmetry, BoundaryTag::Vacuum, BoundaryTag::Symmetry,
                                            BoundaryTag::FixedTemperature});
  EXPECT_EQ(m->boundary(fields::Side::Left, 1), BoundaryTag::Symmetry);
  EXPECT_EQ(m->boundary(fields::Side::Right, 0), BoundaryTag::Vacuum);
  EXPECT_EQ(m->boundary(fields::Side::Top, 2), BoundaryTag::FixedTemperature);
}

TEST(Field, InnerProductExamples) {
  const auto m = make_mesh(8, 8, 1.0 / 8, 1.0 / 8);
  const fields::ScalarField one(m, 1.0);
  EXPECT_NEAR(fields::inner_product(one, one), 1.0, 1e-14);

  fields::MeshDescription d;
  d.mask = fields::parse_region_mask("1 2\n1 2\n");
  auto m2 = std::make_shared<const fields::StructuredMesh>(fields::build_mesh(d));
  EXPECT_EQ(fields::inner_product(fields::region_indicator(m2, 1), fields::region_indicator(m2, 2)), 0.0);

  const auto fine = make_mesh(64, 64, 1.0 / 64, 1.0 / 64);
  const auto x = fields::sample_field(fine, [](double x, double) { return x; });
  EXPECT_NEAR(fields::inner_product(x, x), 1.0 / 3.0, 1e-4);
}

TEST(Field, MeshMismatch) {
  const fields::ScalarField a(make_mesh(2, 2, 1, 1), 1.0), b(make_mesh(2, 3, 1, 1), 1.0);
  EXPECT_EQ(error_code_of([&] { fields::inner_product(a, b); }), ErrorCode::MeshMismatch);
}

TEST(Field, ReduceExamples) {
  const auto m = make_mesh(4, 4, 0.25, 0.25);
  const fields::ScalarField neg(m, -1.0);
  EXPECT_NEAR(fields::reduce_field(neg, Reduction::L1Norm), 1.0, 1e-14);
  EXPECT_NEAR(fields::reduce_field(neg, Reduction::Integral), -1.0, 1e-14);
  const fields::ScalarField zero(m);
  for (auto k : {Reduction::L1Norm, Reduction::L2Norm, Reduction::Integral}) EXPECT_EQ(fields::reduce_field(zero, k), 0.0);
  const auto half = fields::sample_field(m, [](double x, double) { return x < 0.5 ? 2.0 : 0.0; });
  EXPECT_NEAR(fields::reduce_field(half, Reduction::L1Norm), 1.0, 1e-14);
  EXPECT_NEAR(fields::reduce_field(half, Reduction::L2Norm), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(fields::reduce_field(half, Reduction::Integral), 1.0, 1e-14);
}

TEST(FieldProperty, PositivityCauchySchwarzHomogeneity) {
  const auto m = make_mesh(7, 5, 0.3, 0.7);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto f = random_field(m, 2 * s), g = random_field(m, 2 * s + 1);
    EXPECT_GT(fields::inner_product(f, f), 0.0);
    EXPECT_LE(std::abs(fields::inner_product(f, g)), fields::l2_norm(f) * fields::l2_norm(g) * (1 + 1e-14));
    const double c = uniform(s, 0, -5.0, 5.0);
    EXPECT_NEAR(fields::reduce_field(c * f, Reduction::L1Norm), std::abs(c) * fields::reduce_field(f, Reduction::L1Norm),
                1e-12 * fields::reduce_field(f, Reduction::L1Norm) * 5);
    EXPECT_NEAR(fields::inner_product(f, g), fields::inner_product(g, f), 1e-14);
  }
  EXPECT_EQ(fields::inner_product(fields::ScalarField(m), fields::ScalarField(m)), 0.0);
}

TEST(Mask, RoundTrip) {
  const auto mask = fields::parse_region_mask("1 1 2\n3 2 2\n");
  const auto dir = scratch_dir("mask");
  fields::write_region_mask(dir / "m.mask", mask);
  const auto back = fields::read_region_mask(dir / "m.mask");
  EXPECT_EQ(back.nx, 3u);
  EXPECT_EQ(back.ids, mask.ids);
}

}  // namespace
}  // namespace romassim
