#include "snt/fixtures.hpp"

#include <filesystem>
#include <random>

#include "snt/io.hpp"
#include "snt/orbits.hpp"
#include "snt/snt_module.hpp"

namespace snt::fixtures {

namespace {

using io::json;

std::vector<std::size_t> random_partition(std::mt19937_64& rng, std::size_t max_total) {
  std::uniform_int_distribution<std::size_t> parts(1, 3), size(1, 4);
  std::vector<std::size_t> p;
  std::size_t total = 0, n = parts(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = size(rng);
    if (total + k > max_total) break;
    p.push_back(k);
    total += k;
  }
  if (p.empty()) p.push_back(1);
  std::sort(p.rbegin(), p.rend());
  return p;
}

template <class K>
json planted_module(const io::FieldSpec& spec, const FieldOf<K>& f, std::mt19937_64& rng, bool symplectic) {
  auto part = random_partition(rng, 6);
  auto m = standard_module<K>(f, part);
  Matrix<K> b = symplectic ? random_symplectic(m.gram, rng) : random_invertible<K>(f, m.dim(), rng);
  return io::module_json(spec, change_basis(m, b), &part);
}

template <class K>
json tensor_json(const io::FieldSpec& spec, const std::vector<std::size_t>& partition, const Matrix<K>& q,
                 const Matrix<K>& x) {
  return {{"field", spec.name()}, {"partition", partition}, {"v_gram", io::matrix_json(q)}, {"x", io::matrix_json(x)}};
}

template <class K>
Matrix<K> random_tensor(const TensorSetting<K>& s, std::mt19937_64& rng) {
  Matrix<K> x(s.field(), s.m(), s.n());
  for (std::size_t a = 0; a < s.m(); ++a)
    for (std::size_t b = 0; b < s.n(); ++b) x(a, b) = s.field().random(rng, 2);
  return x;
}

// x and x.g for a random orthogonal g, plus a tensor outside the orbit of x.
template <class K>
void orbit_pair(std::vector<FixtureFile>& out, const std::string& stem, const io::FieldSpec& spec,
                const FieldOf<K>& f, const std::vector<std::size_t>& partition, const Matrix<K>& q,
                std::mt19937_64& rng) {
  auto s = standard_setting<K>(f, partition, q);
  Matrix<K> x = random_tensor(s, rng);
  while (image_of(s, x).size() == 0) x = random_tensor(s, rng);
  auto g = random_orthogonal(q, s.precision, rng, 3);
  Matrix<K> y = act(s, x, g);
  Matrix<K> z = x * f.from_int(2);
  if (same_orbit(s, x, z)) z = s.t_minus.transpose() * x;
  out.push_back({"orbits/" + stem + "_x.json", tensor_json(spec, partition, q, x)});
  out.push_back({"orbits/" + stem + "_y.json", tensor_json(spec, partition, q, y)});
  out.push_back({"orbits/" + stem + "_other.json", tensor_json(spec, partition, q, z)});
}

}  // namespace

std::vector<FixtureFile> generate(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FixtureFile> out;
  RationalField qq;
  PrimeField f3(3), f5(5);
  io::FieldSpec sq{}, s3{3}, s5{5};

  // modules for the decompose command
  std::vector<std::size_t> p21{2, 1};
  auto h21 = standard_module<Rational>(qq, p21);
  out.push_back({"modules/h2_h1.json", io::module_json(sq, h21, &p21)});
  auto bad = h21;
  bad.gram(3, 0) = Rational(1);  // G(0,3) = 1 as well: symmetric entry
  out.push_back({"modules/h2_h1_corrupted.json", io::module_json(sq, bad, &p21)});
  std::vector<std::size_t> p31{3, 1}, p221{2, 2, 1};
  out.push_back({"modules/base_changed_q.json",
                 io::module_json(sq, change_basis(standard_module<Rational>(qq, p31),
                                                  random_invertible<Rational>(qq, 8, rng)), &p31)});
  out.push_back({"modules/base_changed_f5.json",
                 io::module_json(s5, change_basis(standard_module<ModP>(f5, p221),
                                                  random_invertible<ModP>(f5, 10, rng)), &p221)});

  // tensors for the orbit command
  auto id3 = Matrix<ModP>::identity(f3, 3);
  out.push_back({"orbits/zero.json", tensor_json(s3, {1}, id3, Matrix<ModP>(f3, 1, 3))});
  auto hq = Matrix<Rational>::from_ints(qq, {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
  orbit_pair<Rational>(out, "pair_q", sq, qq, p21, hq, rng);
  orbit_pair<ModP>(out, "pair_f5", s5, f5, p31, Matrix<ModP>::from_ints(f5, {{1, 0}, {0, 2}}), rng);
  out.push_back({"orbits/mismatch_y.json",
                 tensor_json(sq, p21, Matrix<Rational>::identity(qq, 2), Matrix<Rational>(qq, 3, 2))});

  // lattices
  out.push_back({"lattices/e8.json", io::lattice_json({analytic::e8(), analytic::weyl_group_order_e8()})});

  // acceptance data
  json dec = json::array();
  for (int i = 0; i < 100; ++i) dec.push_back(planted_module<Rational>(sq, qq, rng, true));
  for (int i = 0; i < 100; ++i) dec.push_back(planted_module<ModP>(s5, f5, rng, true));
  out.push_back({"acceptance/decompose.json", {{"modules", dec}}});

  json census = json::array();
  census.push_back({{"name", "H1 (x) diag(1,1,1) over F_3"}, {"field", "GF(3)"}, {"partition", {1}},
                    {"v_gram", io::matrix_json(id3)}});
  census.push_back({{"name", "H2 (x) hyperbolic plane over F_3"}, {"field", "GF(3)"}, {"partition", {2}},
                    {"v_gram", io::matrix_json(Matrix<ModP>::from_ints(f3, {{0, 1}, {1, 0}}))}});
  census.push_back({{"name", "H1 (x) diag(1,1) over F_5"}, {"field", "GF(5)"}, {"partition", {1}},
                    {"v_gram", io::matrix_json(Matrix<ModP>::identity(f5, 2))}});
  out.push_back({"acceptance/census.json", {{"cases", census}}});

  json points = json::array();
  points.push_back({{"tau11", "2i"}, {"tau12", "0"}, {"tau22", "2i"}});
  points.push_back({{"tau11", "2i"}, {"tau12", "0.5i"}, {"tau22", "2i"}});
  points.push_back({{"tau11", "3i"}, {"tau12", "0.3+0.5i"}, {"tau22", "2.5i"}});
  json rank1 = json::array({"1.5i", "2i", "3i"});
  out.push_back({"acceptance/siegel.json", {{"points", points}, {"rank_one_points", rank1}}});

  std::uniform_int_distribution<std::uint64_t> seeds(1, 1'000'000);
  json sampling{{"block_profile_seed", seeds(rng)}, {"witt_seed", seeds(rng)}, {"submersive_seed", seeds(rng)}};
  out.push_back({"acceptance/sampling.json", sampling});
  return out;
}

std::vector<std::string> write(const std::string& root, const std::vector<FixtureFile>& files) {
  std::vector<std::string> written;
  for (const auto& f : files) {
    std::filesystem::path p = std::filesystem::path(root) / f.path;
    std::filesystem::create_directories(p.parent_path());
    io::save_json(p.string(), f.content);
    written.push_back(p.string());
  }
  return written;
}

}  // namespace snt::fixtures
