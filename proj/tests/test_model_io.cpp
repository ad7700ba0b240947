#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "unargmax/model_io.hpp"
#include "unargmax/npy.hpp"

namespace ua = unargmax;
using ua::testing::rows;
using ua::testing::temp_dir;
using ua::testing::vec;

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Hand-assembled NPY file with an arbitrary header dictionary and payload.
std::vector<unsigned char> raw_npy(const std::string& dict, const void* payload, std::size_t nbytes,
                                   unsigned char major = 1) {
  std::string header = dict;
  std::size_t total = 10 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header += '\n';
  std::vector<unsigned char> out = {0x93, 'N', 'U', 'M', 'P', 'Y', major, 0x00};
  out.push_back(static_cast<unsigned char>(header.size() & 0xFF));
  out.push_back(static_cast<unsigned char>(header.size() >> 8));
  out.insert(out.end(), header.begin(), header.end());
  const auto* p = static_cast<const unsigned char*>(payload);
  out.insert(out.end(), p, p + nbytes);
  return out;
}

}  // namespace

TEST(Npy, LoadsHandWrittenTwoByOne) {
  auto dir = temp_dir("npy_basic");
  const double data[] = {1.0, -1.0};
  spit(dir / "w.npy", raw_npy("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 1), }", data, sizeof data));
  auto spec = ua::load_spec(dir / "w.npy");
  EXPECT_EQ(spec.classes(), 2);
  EXPECT_EQ(spec.dim(), 1);
  EXPECT_FALSE(spec.has_bias());
  EXPECT_EQ(spec.weights(0, 0), 1.0);
  EXPECT_EQ(spec.weights(1, 0), -1.0);
  EXPECT_EQ(spec.name, "w");
}

TEST(Npy, WidensFloat32) {
  auto dir = temp_dir("npy_f4");
  const float data[] = {0.1f, 2.5f, -3.0f, 4.0f};
  spit(dir / "w.npy", raw_npy("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 2), }", data, sizeof data));
  auto spec = ua::load_spec(dir / "w.npy");
  EXPECT_EQ(spec.weights(0, 0), static_cast<double>(0.1f));
  EXPECT_EQ(spec.weights(1, 1), 4.0);
}

TEST(Npy, TransposesFortranOrder) {
  auto dir = temp_dir("npy_fortran");
  // Column-major storage of [[1, 2, 3], [4, 5, 6]].
  const double data[] = {1, 4, 2, 5, 3, 6};
  spit(dir / "w.npy", raw_npy("{'descr': '<f8', 'fortran_order': True, 'shape': (2, 3), }", data, sizeof data));
  auto spec = ua::load_spec(dir / "w.npy");
  EXPECT_EQ(spec.weights, rows({{1, 2, 3}, {4, 5, 6}}));
}

TEST(Npy, RejectsOtherVersionsAndTypes) {
  auto dir = temp_dir("npy_reject");
  const double data[] = {1.0, -1.0};
  spit(dir / "v2.npy", raw_npy("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 1), }", data, sizeof data, 2));
  EXPECT_THROW(ua::load_spec(dir / "v2.npy"), ua::ParseError);
  spit(dir / "be.npy", raw_npy("{'descr': '>f8', 'fortran_order': False, 'shape': (2, 1), }", data, sizeof data));
  EXPECT_THROW(ua::load_spec(dir / "be.npy"), ua::ParseError);
  spit(dir / "short.npy", raw_npy("{'descr': '<f8', 'fortran_order': False, 'shape': (3, 1), }", data, sizeof data));
  EXPECT_THROW(ua::load_spec(dir / "short.npy"), ua::ParseError);
  spit(dir / "junk.npy", {'n', 'o', 't', 'n', 'p', 'y', 0, 0, 0, 0});
  EXPECT_THROW(ua::load_spec(dir / "junk.npy"), ua::ParseError);
  spit(dir / "badhdr.npy", raw_npy("{'descr': '<f8', 'fortran_order': Maybe, 'shape': (2, 1), }", data, sizeof data));
  EXPECT_THROW(ua::load_spec(dir / "badhdr.npy"), ua::ParseError);
}

TEST(Npy, RankErrors) {
  auto dir = temp_dir("npy_rank");
  const double data[] = {1.0, -1.0, 0.5};
  spit(dir / "vec.npy", raw_npy("{'descr': '<f8', 'fortran_order': False, 'shape': (3,), }", data, sizeof data));
  spit(dir / "mat.npy", raw_npy("{'descr': '<f8', 'fortran_order': False, 'shape': (3, 1), }", data, sizeof data));
  EXPECT_THROW(ua::load_spec(dir / "vec.npy"), ua::ShapeError);
  EXPECT_THROW(ua::load_spec(dir / "mat.npy", dir / "mat.npy"), ua::ShapeError);
  EXPECT_NO_THROW(ua::load_spec(dir / "mat.npy", dir / "vec.npy"));
}

TEST(ModelIo, BiasLengthMismatch) {
  auto dir = temp_dir("io_mismatch");
  ua::save_weights(dir / "w.npy", ua::Matrix::Ones(4, 2));
  ua::save_bias(dir / "b.npy", ua::Vector::Zero(3));
  EXPECT_THROW(ua::load_spec(dir / "w.npy", dir / "b.npy"), ua::LengthMismatch);
}

TEST(ModelIo, NonFiniteWeights) {
  auto dir = temp_dir("io_nan");
  ua::Matrix w = ua::Matrix::Ones(3, 2);
  w(1, 1) = std::numeric_limits<double>::quiet_NaN();
  ua::save_weights(dir / "w.npy", w);
  EXPECT_THROW(ua::load_spec(dir / "w.npy"), ua::ValueError);
  w(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ua::make_spec(w), ua::ValueError);
}

TEST(ModelIo, VocabularyLengthAndName) {
  auto dir = temp_dir("io_vocab");
  ua::save_weights(dir / "w.npy", ua::Matrix::Ones(3, 2));
  std::ofstream(dir / "ok.json") << R"({"name": "toy", "tokens": ["a", "b", "c"]})";
  std::ofstream(dir / "short.json") << R"({"name": "toy", "tokens": ["a", "b"]})";
  std::ofstream(dir / "bad.json") << R"({"tokens": "abc"})";
  auto spec = ua::load_spec(dir / "w.npy", std::nullopt, dir / "ok.json");
  EXPECT_EQ(spec.name, "toy");
  ASSERT_TRUE(spec.tokens);
  EXPECT_EQ((*spec.tokens)[2], "c");
  EXPECT_THROW(ua::load_spec(dir / "w.npy", std::nullopt, dir / "short.json"), ua::LengthMismatch);
  EXPECT_THROW(ua::load_spec(dir / "w.npy", std::nullopt, dir / "bad.json"), ua::ParseError);
}

TEST(ModelIo, SpecInvariants) {
  EXPECT_THROW(ua::make_spec(ua::Matrix::Ones(1, 3)), ua::ShapeError);
  EXPECT_THROW(ua::make_spec(ua::Matrix::Ones(3, 0)), ua::ShapeError);
}

// Property: reading a float64 file and writing it back reproduces the
// payload bytes exactly, including signed zeros, subnormals and extremes.
TEST(ModelIo, DoublePayloadRoundTripIsBytewise) {
  auto dir = temp_dir("io_roundtrip");
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ua::Index n = 2 + static_cast<ua::Index>(rng() % 30);
    const ua::Index d = 1 + static_cast<ua::Index>(rng() % 12);
    ua::Matrix w(n, d);
    for (ua::Index i = 0; i < w.size(); ++i) {
      std::uint64_t bits = rng();
      double v;
      std::memcpy(&v, &bits, sizeof v);
      if (!std::isfinite(v)) v = -0.0;
      w.data()[i] = v;
    }
    w(0, 0) = std::numeric_limits<double>::denorm_min();
    ua::save_weights(dir / "a.npy", w);
    auto spec = ua::load_spec(dir / "a.npy");
    ua::save_weights(dir / "b.npy", spec.weights);
    const auto a = slurp(dir / "a.npy");
    const auto b = slurp(dir / "b.npy");
    ASSERT_EQ(a, b);
    ASSERT_EQ(0, std::memcmp(spec.weights.data(), w.data(), sizeof(double) * static_cast<std::size_t>(w.size())));
  }
}

TEST(ModelIo, WrittenHeaderIsAlignedAndParsable) {
  const std::size_t shape[2] = {3, 2};
  const double data[6] = {1, 2, 3, 4, 5, 6};
  auto bytes = ua::npy::encode(shape, data);
  const std::size_t header_len = bytes[8] | (bytes[9] << 8);
  EXPECT_EQ((10 + header_len) % 64, 0u);
  EXPECT_EQ(bytes[10 + header_len - 1], '\n');
  auto arr = ua::npy::parse(bytes);
  EXPECT_EQ(arr.shape, (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(arr.data[5], 6.0);
}

TEST(TokenFilter, ScriptDigitsAndSpecial) {
  auto spec = ua::make_spec(ua::Matrix::Zero(5, 2), std::nullopt,
                            std::vector<std::string>{"Пред", "abc", "a1b", ",", "<unk>"});
  ua::TokenFilter f;
  f.allowed_scripts = {"Cyrillic"};
  f.drop_digits_punct = true;
  f.keep_special = false;
  EXPECT_EQ(ua::apply_filter(spec, f), (std::vector<ua::Index>{0}));
  f.keep_special = true;
  EXPECT_EQ(ua::apply_filter(spec, f), (std::vector<ua::Index>{0, 4}));
}

TEST(TokenFilter, WordStemSurvivesDigitPunctFilter) {
  ua::TokenFilter f;
  f.drop_digits_punct = true;
  ua::CompiledFilter pass(f);
  EXPECT_TRUE(pass("erecti"));
  EXPECT_TRUE(pass("\xE2\x96\x81" "erecti"));  // SentencePiece word-start marker
  EXPECT_TRUE(pass("erecti@@"));            // subword-nmt continuation marker
  EXPECT_FALSE(pass("erecti-"));
  EXPECT_FALSE(pass("2019"));
  EXPECT_FALSE(pass("\xD9\xA3"));           // Arabic-Indic digit three
}

TEST(TokenFilter, ScriptFilterIgnoresMarksAndCommonCharacters) {
  ua::TokenFilter f;
  f.allowed_scripts = {"Greek"};
  ua::CompiledFilter pass(f);
  EXPECT_TRUE(pass("κ\xCC\x81κ\xCC\x81"));  // combining acute is Inherited
  EXPECT_TRUE(pass("αβ-γ"));
  EXPECT_FALSE(pass("αb"));
  EXPECT_TRUE(pass("123"));  // no letters at all
}

TEST(TokenFilter, IdentityFilterKeepsEverything) {
  auto spec = ua::make_spec(ua::Matrix::Zero(3, 1), std::nullopt, std::vector<std::string>{"a", "1", "<s>"});
  EXPECT_EQ(ua::apply_filter(spec, ua::TokenFilter{}), (std::vector<ua::Index>{0, 1, 2}));
}

TEST(TokenFilter, MissingVocabulary) {
  auto spec = ua::make_spec(ua::Matrix::Zero(3, 1));
  ua::TokenFilter f;
  f.drop_digits_punct = true;
  EXPECT_THROW(ua::apply_filter(spec, f), ua::MissingVocab);
  f.drop_digits_punct = false;
  f.allowed_scripts = {"NotAScript"};
  auto with_vocab = ua::make_spec(ua::Matrix::Zero(3, 1), std::nullopt, std::vector<std::string>{"a", "b", "c"});
  EXPECT_THROW(ua::apply_filter(with_vocab, f), ua::ValueError);
}
