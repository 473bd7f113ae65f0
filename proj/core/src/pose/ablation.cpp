// Copyright 2026 The posenas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "posenas/pose/ablation.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "posenas/cost/flops.hpp"

namespace posenas {
namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double SicAblationRow::mean_pck() const { return mean(pck); }
double SicAblationRow::mean_checkerboard() const { return mean(checkerboard); }

int SicAblationReport::checkerboard_wins() const {
  int wins = 0;
  for (std::size_t i = 0; i < on.checkerboard.size() && i < off.checkerboard.size(); ++i) {
    if (on.checkerboard[i] < off.checkerboard[i]) ++wins;
  }
  return wins;
}

std::string SicAblationReport::to_text() const {
  std::ostringstream out;
  char buf[128];
  out << "variant  pck      checkerboard  mflops\n";
  for (const auto* row : {&on, &off}) {
    std::snprintf(buf, sizeof buf, "%-8s %.4f   %.6f      %.4f\n", row->sic ? "sic-on" : "sic-off", row->mean_pck(),
                  row->mean_checkerboard(), row->mflops);
    out << buf;
  }
  out << "seeds " << seeds.size() << " checkerboard_wins " << checkerboard_wins() << "\n";
  return out.str();
}

template <typename T>
SicAblationReport ablate_sic(const std::vector<KeypointSample>& train, const std::vector<KeypointSample>& test,
                             const ArchitectureDescriptor& base, const TrainOptions& opts,
                             const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 2) throw std::invalid_argument("ablate_sic needs at least two seeds");
  if (train.empty() || test.empty()) throw std::invalid_argument("ablate_sic needs training and test samples");
  SicAblationReport report;
  report.seeds = seeds;
  ArchitectureDescriptor with = base, without = base;
  with.head.sic = true;
  without.head.sic = false;
  report.on.sic = true;
  report.off.sic = false;
  report.on.mflops = to_mflops(flops_of(with).total());
  report.off.mflops = to_mflops(flops_of(without).total());
  for (const auto seed : seeds) {
    for (auto* row : {&report.on, &report.off}) {
      Rng rng(seed);
      Network<T> net(row->sic ? with : without, rng);
      TrainOptions o = opts;
      o.seed = seed;
      train_derived(net, train, {}, o);
      row->pck.push_back(evaluate_pck(net, test, opts.pck_alpha));
      row->checkerboard.push_back(feature_checkerboard(net, test));
    }
  }
  return report;
}

template SicAblationReport ablate_sic<float>(const std::vector<KeypointSample>&, const std::vector<KeypointSample>&,
                                             const ArchitectureDescriptor&, const TrainOptions&,
                                             const std::vector<std::uint64_t>&);
template SicAblationReport ablate_sic<double>(const std::vector<KeypointSample>&, const std::vector<KeypointSample>&,
                                              const ArchitectureDescriptor&, const TrainOptions&,
                                              const std::vector<std::uint64_t>&);

}  // namespace posenas
