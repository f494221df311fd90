#include "sro/policy.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sro/numeric.hpp"

namespace sro {

PolicyArch arch_for_vocab(const Vocab& v, int embed_dim, int hidden_dim,
                          int max_len) {
  PolicyArch a;
  a.vocab_size = v.total_size();
  a.embed_dim = embed_dim;
  a.hidden_dim = hidden_dim;
  a.max_len = max_len;
  return a;
}

PolicyModel::PolicyModel(PolicyArch arch) : arch_(arch) {
  if (arch_.vocab_size < 5 || arch_.embed_dim <= 0 || arch_.hidden_dim <= 0 ||
      arch_.max_len <= 0) {
    throw ArgumentError("PolicyModel: invalid architecture dimensions");
  }
  const Index v = arch_.vocab_size, e = arch_.embed_dim, h = arch_.hidden_dim;
  off_e_ = 0;
  off_wr_ = off_e_ + v * e;
  off_wz_ = off_wr_ + h * e;
  off_wn_ = off_wz_ + h * e;
  off_ur_ = off_wn_ + h * e;
  off_uz_ = off_ur_ + h * h;
  off_un_ = off_uz_ + h * h;
  off_br_ = off_un_ + h * h;
  off_bz_ = off_br_ + h;
  off_bn_ = off_bz_ + h;
  off_who_ = off_bn_ + h;
  off_bo_ = off_who_ + e * h;
  params_ = Vec::Zero(off_bo_ + e);
}

PolicyModel init_policy(const PolicyArch& arch, std::uint64_t seed) {
  PolicyModel m(arch);
  Rng rng(seed);
  constexpr double kInitScale = 0.08;
  for (Index i = 0; i < m.n_params(); ++i) {
    m.params()[i] = (rng.uniform() * 2.0 - 1.0) * kInitScale;
  }
  return m;
}

namespace {

struct Sequence {
  std::vector<int> inputs;   // BOS + x + SEP + y, consumed in order
  std::vector<int> targets;  // next-token targets for scored positions
  int first_scored = 0;      // == |x| + 1 (the SEP position)
};

Sequence build_sequence(const PolicyArch& arch, const TokenSeq& y,
                        const TokenSeq& x) {
  auto check = [&](const std::vector<int>& ids, const char* name) {
    if (static_cast<int>(ids.size()) > arch.max_len) {
      throw ArgumentError(std::string("log_prob: ") + name + " exceeds max_len");
    }
    for (int id : ids) {
      if (id < 0 || id >= arch.vocab_size) {
        throw ArgumentError(std::string("log_prob: token id out of range in ") + name);
      }
    }
  };
  check(x.ids, "x");
  check(y.ids, "y");

  Sequence s;
  s.inputs.reserve(x.ids.size() + y.ids.size() + 2);
  s.inputs.push_back(arch.bos_id());
  s.inputs.insert(s.inputs.end(), x.ids.begin(), x.ids.end());
  s.inputs.push_back(arch.sep_id());
  s.inputs.insert(s.inputs.end(), y.ids.begin(), y.ids.end());
  s.first_scored = static_cast<int>(x.ids.size()) + 1;

  s.targets.reserve(y.ids.size() + 1);
  s.targets.insert(s.targets.end(), y.ids.begin(), y.ids.end());
  s.targets.push_back(arch.eos_id());
  return s;
}

// One GRU cell update. All arguments are column vectors of hidden_dim except
// e (embed_dim). Gate caches are written for the backward pass.
template <typename EVec>
void gru_step(const PolicyModel& m, const EVec& e, const Vec& h_prev, Vec& r,
              Vec& z, Vec& n, Vec& hl, Vec& h_out) {
  r = m.w_r() * e + m.u_r() * h_prev + m.b_r();
  z = m.w_z() * e + m.u_z() * h_prev + m.b_z();
  for (Index i = 0; i < r.size(); ++i) r[i] = sigmoid(r[i]);
  for (Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
  hl.noalias() = m.u_n() * h_prev;
  n = m.w_n() * e + r.cwiseProduct(hl) + m.b_n();
  n = n.array().tanh();
  h_out = (Vec::Ones(z.size()) - z).cwiseProduct(n) + z.cwiseProduct(h_prev);
}

struct ForwardTrace {
  Mat h;            // hidden x (T+1); column 0 is the zero initial state
  Mat r, z, n, hl;  // hidden x T
  Mat p;            // vocab x n_scored
  Mat o;            // embed x n_scored
  double logp = 0.0;
};

ForwardTrace run_forward(const PolicyModel& m, const Sequence& s,
                         bool keep_trace) {
  const int T = static_cast<int>(s.inputs.size());
  const int n_scored = static_cast<int>(s.targets.size());
  const Index H = m.arch().hidden_dim;
  const auto E = m.embedding();

  ForwardTrace tr;
  tr.h.setZero(H, T + 1);
  tr.r.resize(H, T);
  tr.z.resize(H, T);
  tr.n.resize(H, T);
  tr.hl.resize(H, T);
  if (keep_trace) {
    tr.p.resize(m.arch().vocab_size, n_scored);
    tr.o.resize(m.arch().embed_dim, n_scored);
  }

  Vec r(H), z(H), nn(H), hl(H), h_new(H);
  for (int t = 0; t < T; ++t) {
    const Vec e = E.row(s.inputs[static_cast<std::size_t>(t)]).transpose();
    gru_step(m, e, Vec(tr.h.col(t)), r, z, nn, hl, h_new);
    tr.r.col(t) = r;
    tr.z.col(t) = z;
    tr.n.col(t) = nn;
    tr.hl.col(t) = hl;
    tr.h.col(t + 1) = h_new;

    if (t >= s.first_scored) {
      const int k = t - s.first_scored;
      Vec o = m.w_ho() * h_new + m.b_o();
      Vec u = E * o;
      const double lse = logsumexp(u);
      tr.logp += u[s.targets[static_cast<std::size_t>(k)]] - lse;
      if (keep_trace) {
        tr.o.col(k) = o;
        u = (u.array() - lse).exp();
        tr.p.col(k) = u;
      }
    }
  }
  return tr;
}

}  // namespace

double log_prob(const PolicyModel& m, const TokenSeq& y, const TokenSeq& x) {
  const Sequence s = build_sequence(m.arch(), y, x);
  return run_forward(m, s, /*keep_trace=*/false).logp;
}

Scored score_with_grad(const PolicyModel& m, const TokenSeq& y,
                       const TokenSeq& x) {
  const Sequence s = build_sequence(m.arch(), y, x);
  const ForwardTrace tr = run_forward(m, s, /*keep_trace=*/true);

  const PolicyArch& a = m.arch();
  const Index H = a.hidden_dim;
  const int T = static_cast<int>(s.inputs.size());
  const auto E = m.embedding();

  Scored out;
  out.logp = tr.logp;
  out.grad = Vec::Zero(m.n_params());
  double* g = out.grad.data();
  Eigen::Map<Mat> gE(g + m.off_e(), a.vocab_size, a.embed_dim);
  Eigen::Map<Mat> gWr(g + m.off_wr(), H, a.embed_dim);
  Eigen::Map<Mat> gWz(g + m.off_wz(), H, a.embed_dim);
  Eigen::Map<Mat> gWn(g + m.off_wn(), H, a.embed_dim);
  Eigen::Map<Mat> gUr(g + m.off_ur(), H, H);
  Eigen::Map<Mat> gUz(g + m.off_uz(), H, H);
  Eigen::Map<Mat> gUn(g + m.off_un(), H, H);
  Eigen::Map<Vec> gbr(g + m.off_br(), H);
  Eigen::Map<Vec> gbz(g + m.off_bz(), H);
  Eigen::Map<Vec> gbn(g + m.off_bn(), H);
  Eigen::Map<Mat> gWho(g + m.off_who(), a.embed_dim, H);
  Eigen::Map<Vec> gbo(g + m.off_bo(), a.embed_dim);

  Vec dh_next = Vec::Zero(H);
  for (int t = T - 1; t >= 0; --t) {
    Vec dh = dh_next;
    if (t >= s.first_scored) {
      const int k = t - s.first_scored;
      Vec du = -tr.p.col(k);
      du[s.targets[static_cast<std::size_t>(k)]] += 1.0;
      gE.noalias() += du * tr.o.col(k).transpose();
      const Vec dO = E.transpose() * du;
      gWho.noalias() += dO * tr.h.col(t + 1).transpose();
      gbo += dO;
      dh.noalias() += m.w_ho().transpose() * dO;
    }

    const auto h_prev = tr.h.col(t);
    const auto r = tr.r.col(t);
    const auto z = tr.z.col(t);
    const auto nn = tr.n.col(t);
    const auto hl = tr.hl.col(t);
    const Vec e = E.row(s.inputs[static_cast<std::size_t>(t)]).transpose();

    const Vec dn = dh.cwiseProduct(Vec::Ones(H) - z);
    const Vec dz = dh.cwiseProduct(h_prev - nn);
    Vec dh_prev = dh.cwiseProduct(z);

    const Vec dan = dn.cwiseProduct(Vec::Ones(H) - nn.cwiseProduct(nn));
    gWn.noalias() += dan * e.transpose();
    gbn += dan;
    const Vec dr = dan.cwiseProduct(hl);
    const Vec dhl = dan.cwiseProduct(r);
    gUn.noalias() += dhl * h_prev.transpose();
    dh_prev.noalias() += m.u_n().transpose() * dhl;

    const Vec daz = dz.cwiseProduct(z).cwiseProduct(Vec::Ones(H) - z);
    gWz.noalias() += daz * e.transpose();
    gUz.noalias() += daz * h_prev.transpose();
    gbz += daz;
    dh_prev.noalias() += m.u_z().transpose() * daz;

    const Vec dar = dr.cwiseProduct(r).cwiseProduct(Vec::Ones(H) - r);
    gWr.noalias() += dar * e.transpose();
    gUr.noalias() += dar * h_prev.transpose();
    gbr += dar;
    dh_prev.noalias() += m.u_r().transpose() * dar;

    const Vec de = m.w_r().transpose() * dar + m.w_z().transpose() * daz +
                   m.w_n().transpose() * dan;
    gE.row(s.inputs[static_cast<std::size_t>(t)]) += de.transpose();

    dh_next = dh_prev;
  }
  return out;
}

Vec grad_log_prob(const PolicyModel& m, const TokenSeq& y, const TokenSeq& x) {
  return score_with_grad(m, y, x).grad;
}

namespace {

// Hidden state after consuming BOS + x + SEP.
Vec run_prefix(const PolicyModel& m, const TokenSeq& x) {
  const Index H = m.arch().hidden_dim;
  const auto E = m.embedding();
  std::vector<int> prefix;
  prefix.reserve(x.ids.size() + 2);
  prefix.push_back(m.arch().bos_id());
  prefix.insert(prefix.end(), x.ids.begin(), x.ids.end());
  prefix.push_back(m.arch().sep_id());

  Vec h = Vec::Zero(H), r(H), z(H), nn(H), hl(H), h_new(H);
  for (int id : prefix) {
    if (id < 0 || id >= m.arch().vocab_size) {
      throw ArgumentError("sample: token id out of range in x");
    }
    const Vec e = E.row(id).transpose();
    gru_step(m, e, h, r, z, nn, hl, h_new);
    h = h_new;
  }
  return h;
}

Vec next_distribution(const PolicyModel& m, const Vec& h) {
  Vec u = m.embedding() * (m.w_ho() * h + m.b_o());
  softmax_inplace(u);
  return u;
}

}  // namespace

Vec first_token_distribution(const PolicyModel& m, const TokenSeq& x) {
  return next_distribution(m, run_prefix(m, x));
}

SampleResult sample(const PolicyModel& m, const TokenSeq& x, double temperature,
                    int max_len, Rng& rng) {
  if (temperature < 0.0) throw ArgumentError("sample: temperature must be >= 0");
  const int cap = std::min(max_len, m.arch().max_len);
  if (cap <= 0) throw ArgumentError("sample: max_len must be positive");

  const Index H = m.arch().hidden_dim;
  const auto E = m.embedding();
  Vec h = run_prefix(m, x);
  Vec r(H), z(H), nn(H), hl(H), h_new(H);

  SampleResult out;
  for (;;) {
    Vec u = E * (m.w_ho() * h + m.b_o());
    int tok;
    if (temperature == 0.0) {
      Index best;
      u.maxCoeff(&best);  // first maximum: deterministic tie-break
      tok = static_cast<int>(best);
    } else {
      u /= temperature;
      softmax_inplace(u);
      const double draw = rng.uniform();
      double acc = 0.0;
      tok = m.arch().vocab_size - 1;
      for (Index i = 0; i < u.size(); ++i) {
        acc += u[i];
        if (draw < acc) {
          tok = static_cast<int>(i);
          break;
        }
      }
    }
    if (tok == m.arch().eos_id()) break;
    out.seq.ids.push_back(tok);
    if (static_cast<int>(out.seq.ids.size()) >= cap) {
      out.truncated = true;
      break;
    }
    const Vec e = E.row(tok).transpose();
    gru_step(m, e, h, r, z, nn, hl, h_new);
    h = h_new;
  }
  return out;
}

TokenSeq greedy_decode(const PolicyModel& m, const TokenSeq& x, int max_len) {
  Rng unused(0);
  return sample(m, x, 0.0, max_len, unused).seq;
}

void save_policy(const PolicyModel& m, const Vocab& vocab,
                 const std::filesystem::path& path) {
  if (vocab.total_size() != m.arch().vocab_size) {
    throw ArgumentError("save_policy: vocab does not match model arch");
  }
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "policy";
  j["arch"] = {{"vocab_size", m.arch().vocab_size},
               {"embed_dim", m.arch().embed_dim},
               {"hidden_dim", m.arch().hidden_dim},
               {"max_len", m.arch().max_len}};
  j["vocab"] = vocab.base_tokens();
  j["params"] = std::vector<double>(m.params().begin(), m.params().end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump() << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<PolicyModel, Vocab> load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
  if (j.value("kind", "") != "policy") {
    throw SchemaError(path.string() + ": not a policy checkpoint");
  }
  PolicyArch a;
  a.vocab_size = j.at("arch").at("vocab_size").get<int>();
  a.embed_dim = j.at("arch").at("embed_dim").get<int>();
  a.hidden_dim = j.at("arch").at("hidden_dim").get<int>();
  a.max_len = j.at("arch").at("max_len").get<int>();
  PolicyModel m(a);
  auto params = j.at("params").get<std::vector<double>>();
  if (static_cast<Index>(params.size()) != m.n_params()) {
    throw SchemaError(path.string() + ": parameter count does not match arch");
  }
  m.params() = Eigen::Map<const Vec>(params.data(), m.n_params());
  Vocab v = Vocab::from_ordered_tokens(j.at("vocab").get<std::vector<std::string>>());
  if (v.total_size() != a.vocab_size) {
    throw SchemaError(path.string() + ": vocab size does not match arch");
  }
  return {std::move(m), std::move(v)};
}

}  // namespace sro
