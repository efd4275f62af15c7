#include <gtest/gtest.h>

#include <sstream>

#include "mfront/matrix_market.hpp"

using namespace mfront;

TEST(MatrixMarket, SymmetricRoundTrip) {
  const auto system = assemble_system(Mesh(2, 1), make_rhs(RhsFunction::One));
  std::ostringstream out;
  io::write_symmetric(out, system);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("%%MatrixMarket matrix coordinate real symmetric\n", 0), 0u);
  EXPECT_NE(text.find("\n3 3 5\n"), std::string::npos);

  std::istringstream in(text);
  const auto m = io::read_matrix_market(in);
  EXPECT_TRUE(m.symmetric);
  EXPECT_EQ(m.rows, 3);
  EXPECT_EQ(m.entries.size(), system.nnz());
  const auto back = GlobalSystem::from_triplets(3, m.entries);
  EXPECT_EQ(back.to_dense(), system.to_dense());
}

TEST(MatrixMarket, GeneralAndComments) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n% note\n2 2 2\n1 2 3.5\n2 1 -1\n");
  const auto m = io::read_matrix_market(in);
  EXPECT_FALSE(m.symmetric);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].row, 0);
  EXPECT_EQ(m.entries[0].col, 1);
  EXPECT_EQ(m.entries[0].value, 3.5);

  std::ostringstream out;
  io::write_general(out, 2, 2, m.entries);
  std::istringstream again(out.str());
  EXPECT_EQ(io::read_matrix_market(again).entries.size(), 2u);
}

TEST(MatrixMarket, RejectsMalformed) {
  std::istringstream empty("");
  EXPECT_THROW(io::read_matrix_market(empty), Error);
  std::istringstream banner("%%MatrixMarket matrix array real general\n1 1\n1\n");
  EXPECT_THROW(io::read_matrix_market(banner), Error);
  std::istringstream range("%%MatrixMarket matrix coordinate real general\n1 1 1\n2 1 1\n");
  EXPECT_THROW(io::read_matrix_market(range), Error);
  std::istringstream truncated("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
  EXPECT_THROW(io::read_matrix_market(truncated), Error);
}

TEST(Vectors, RoundTripIsExact) {
  const std::vector<double> v{0.1, -2.5e-300, 1.0 / 3.0, 0.0};
  std::ostringstream out;
  io::write_vector(out, v);
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_vector(in), v);
}
