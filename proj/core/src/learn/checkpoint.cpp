#include "risiort/learn/checkpoint.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "risiort/error.hpp"
#include "risiort/hash.hpp"

namespace risiort::learn {

namespace {

constexpr const char* kMagic = "risiort-checkpoint v1";

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    ++line_no_;
    return std::istringstream(line);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("checkpoint line " + std::to_string(line_no_) + ": " + what);
  }

  void expect(std::istringstream& s, const std::string& word) const {
    std::string got;
    if (!(s >> got) || got != word) fail("expected '" + word + "'");
  }

  template <typename T>
  T read(std::istringstream& s) const {
    T v{};
    if (!(s >> v)) fail("malformed integer field");
    return v;
  }

  double read_double(std::istringstream& s) const {
    std::string tok;
    if (!(s >> tok)) fail("missing value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (errno == ERANGE || end != tok.c_str() + tok.size()) fail("malformed value '" + tok + "'");
    return v;
  }

  int line() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

void write_values(std::ostream& out, const double* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out << (i ? " " : "") << data[i];
  out << '\n';
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << kMagic << '\n';
  out << "schedule_hash " << hex64(ckpt.schedule_hash) << '\n';
  out << "nets " << ckpt.nets.size() << '\n';
  out << std::hexfloat;
  for (const auto& nn : ckpt.nets) {
    require(!nn.name.empty() && nn.name.find_first_of(" \t\n") == std::string::npos,
            "write_checkpoint: net names must be non-empty and contain no whitespace");
    const auto& sizes = nn.net.layer_sizes();
    out << "net " << nn.name << " output "
        << (nn.net.output_activation() == OutputActivation::kTanh ? "tanh" : "linear") << " sizes "
        << sizes.size();
    for (int s : sizes) out << ' ' << s;
    out << '\n';
    for (const auto& l : nn.net.weights()) {
      // Row-major rows of W, then b.
      for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
        const Eigen::RowVectorXd row = l.w.row(r);
        out << "w ";
        write_values(out, row.data(), row.size());
      }
      out << "b ";
      write_values(out, l.b.data(), l.b.size());
    }
  }
  out << std::defaultfloat << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  LineReader r(in);
  Checkpoint ckpt;
  auto s = r.next();
  if (s.str() != kMagic) r.fail("bad magic, expected '" + std::string(kMagic) + "'");
  s = r.next();
  r.expect(s, "schedule_hash");
  std::string hex;
  if (!(s >> hex) || hex.size() != 16) r.fail("schedule hash must be 16 hex digits");
  ckpt.schedule_hash = std::stoull(hex, nullptr, 16);
  s = r.next();
  r.expect(s, "nets");
  const auto count = r.read<std::size_t>(s);
  for (std::size_t k = 0; k < count; ++k) {
    s = r.next();
    r.expect(s, "net");
    NamedNet nn;
    if (!(s >> nn.name)) r.fail("missing net name");
    r.expect(s, "output");
    std::string act;
    s >> act;
    if (act != "linear" && act != "tanh") r.fail("unknown output activation '" + act + "'");
    r.expect(s, "sizes");
    const auto n_sizes = r.read<std::size_t>(s);
    std::vector<int> sizes(n_sizes);
    for (auto& v : sizes) {
      v = r.read<int>(s);
      if (v < 1) r.fail("layer sizes must be >= 1");
    }
    if (sizes.size() < 2) r.fail("a net needs at least two layer sizes");
    nn.net = Mlp(sizes, act == "tanh" ? OutputActivation::kTanh : OutputActivation::kLinear);
    for (auto& l : nn.net.weights()) {
      for (Eigen::Index row = 0; row < l.w.rows(); ++row) {
        s = r.next();
        r.expect(s, "w");
        for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(row, c) = r.read_double(s);
      }
      s = r.next();
      r.expect(s, "b");
      for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b(i) = r.read_double(s);
    }
    ckpt.nets.push_back(std::move(nn));
  }
  s = r.next();
  r.expect(s, "end");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);
  write_checkpoint(out, ckpt);
  if (!out) throw ConfigError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace risiort::learn
