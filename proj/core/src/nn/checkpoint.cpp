#include "textrl/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "textrl/errors.hpp"

namespace textrl::nn {

namespace {
constexpr const char* kMagic = "TEXTRL-CKPT";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const ParamContainer& params,
                     const std::map<std::string, std::string>& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << kMagic << ' ' << kVersion << '\n';
  for (const auto& [key, value] : meta) out << "meta " << key << ' ' << value << '\n';
  out << "tensors " << params.count() << '\n';
  for (int i = 0; i < params.count(); ++i) {
    const Mat& m = params.value(i);
    out << "tensor " << params.name(i) << ' ' << m.rows() << ' ' << m.cols()
        << ' ' << (params.is_bias(i) ? 1 : 0) << '\n';
  }
  out << "data\n";
  for (int i = 0; i < params.count(); ++i) {
    const Mat& m = params.value(i);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  }
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");

  Checkpoint ckpt;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty checkpoint '" + path + "'");
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kMagic || version != kVersion)
      throw IoError("bad checkpoint header in '" + path + "'");
  }

  struct Shape {
    std::string name;
    long rows = 0, cols = 0;
    int bias = 0;
  };
  std::vector<Shape> shapes;
  long tensor_count = -1;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ckpt.meta[key] = value;
    } else if (kind == "tensors") {
      ls >> tensor_count;
    } else if (kind == "tensor") {
      Shape s;
      ls >> s.name >> s.rows >> s.cols >> s.bias;
      shapes.push_back(std::move(s));
    } else if (kind == "data") {
      break;
    } else {
      throw IoError("unexpected checkpoint line '" + line + "'");
    }
  }
  if (tensor_count < 0 || static_cast<long>(shapes.size()) != tensor_count)
    throw IoError("checkpoint shape table mismatch in '" + path + "'");

  for (const Shape& s : shapes) {
    int idx = ckpt.params.add(s.name, static_cast<int>(s.rows),
                              static_cast<int>(s.cols), s.bias != 0);
    Mat& m = ckpt.params.value(idx);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (!in) throw IoError("truncated checkpoint '" + path + "'");
  }
  return ckpt;
}

}  // namespace textrl::nn
