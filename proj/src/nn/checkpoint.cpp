#include "crepair/nn/checkpoint.hpp"

#include <bit>
#include <fstream>

#include "crepair/error.hpp"
#include "crepair/io.hpp"

namespace crepair::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

struct Entry {
  std::string name;
  const Mat* value;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainState* state,
                     const Adam* optimizer) {
  std::vector<Entry> entries;
  const ParameterStore& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) entries.push_back({params.name(i), &params.value(i)});
  nlohmann::ordered_json adam = nullptr;
  if (optimizer && optimizer->first_moments().size() == params.size()) {
    adam = {{"t", optimizer->steps()}, {"lr", optimizer->lr()}};
    for (std::size_t i = 0; i < params.size(); ++i)
      entries.push_back({"adam.m." + params.name(i), &optimizer->first_moments()[i]});
    for (std::size_t i = 0; i < params.size(); ++i)
      entries.push_back({"adam.v." + params.name(i), &optimizer->second_moments()[i]});
  } else if (optimizer) {
    adam = {{"t", optimizer->steps()}, {"lr", optimizer->lr()}};
  }
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  std::size_t offset = 0;
  for (const auto& e : entries) {
    tensors.push_back({{"name", e.name}, {"rows", e.value->rows()}, {"cols", e.value->cols()}, {"offset", offset}});
    offset += static_cast<std::size_t>(e.value->size());
  }
  nlohmann::ordered_json header;
  header["format_version"] = 1;
  header["config"] = to_json(model.hyper_params());
  header["vocab"] = model.vocab().to_json();
  header["tensors"] = std::move(tensors);
  header["rng_state"] = state ? nlohmann::ordered_json(to_json(*state)) : nlohmann::ordered_json(nullptr);
  header["adam"] = std::move(adam);

  AtomicFile file(path, true);
  auto& out = file.stream();
  out << header.dump() << '\n';
  for (const auto& e : entries)
    out.write(reinterpret_cast<const char*>(e.value->data()),
              static_cast<std::streamsize>(e.value->size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::Io, "failed to write checkpoint", {{"path", path.string()}});
  file.commit();
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::ModelMissing, "checkpoint not found: " + path.string(), {{"path", path.string()}});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open checkpoint", {{"path", path.string()}});
  std::string first;
  std::getline(in, first);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(first);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed checkpoint header: ") + e.what(),
                {{"path", path.string()}});
  }
  if (!header.is_object() || header.value("format_version", 0) != 1)
    throw Error(ErrorCode::UnsupportedVersion, "unsupported checkpoint format",
                {{"path", path.string()}, {"format_version", header.is_object() ? header.value("format_version", nlohmann::json()) : nlohmann::json()}});
  const std::streamoff data_start = in.tellg();

  auto read_tensor = [&](const nlohmann::json& t) {
    Mat m(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
    in.seekg(data_start + static_cast<std::streamoff>(t.at("offset").get<std::size_t>() * sizeof(double)));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw Error(ErrorCode::InvalidInput, "truncated checkpoint", {{"tensor", t.at("name")}});
    return m;
  };

  HyperParams hp = hyper_params_from_json(header.at("config"));
  Vocabulary vocab = Vocabulary::from_json(header.at("vocab"));
  ParameterStore params;
  std::unordered_map<std::string, Mat> moments;
  for (const auto& t : header.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    if (name.rfind("adam.", 0) == 0) moments.emplace(name, read_tensor(t));
    else params.add(name, read_tensor(t));
  }
  LoadedCheckpoint out{Model(hp, std::move(vocab), std::move(params)), std::nullopt, std::nullopt};
  if (!header["rng_state"].is_null()) out.state = train_state_from_json(header["rng_state"]);
  if (!header["adam"].is_null()) {
    Adam adam(header["adam"].at("lr").get<double>());
    if (!moments.empty()) {
      std::vector<Mat> m, v;
      const ParameterStore& p = out.model.params();
      for (std::size_t i = 0; i < p.size(); ++i) {
        m.push_back(moments.at("adam.m." + p.name(i)));
        v.push_back(moments.at("adam.v." + p.name(i)));
      }
      adam.restore(header["adam"].at("t").get<std::uint64_t>(), std::move(m), std::move(v));
    }
    out.optimizer = std::move(adam);
  }
  return out;
}

}  // namespace crepair::nn
