#pragma once
// The bipartite device/bin graph induced by signature bin choices, plus the
// two structural tools used to reason about decoder behavior: a component
// census (tree / one cycle / more) and an idealized peeling pass that
// repeatedly removes devices sitting alone in some bin. Peeling is exactly
// what successive cancellation achieves when every detection and estimate is
// error free, so it doubles as the reference decoder for noiseless tests.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "sofdm/codebook.hpp"
#include "sofdm/config.hpp"

namespace sofdm {

struct DiscoveryGraph {
  int b_bins = 0;
  std::vector<std::uint64_t> devices;
  std::vector<std::vector<int>> bins_of;  // parallel to devices
};

inline DiscoveryGraph build_graph(const SystemConfig& cfg,
                                  const SignatureProvider& provider,
                                  const std::vector<std::uint64_t>& devices) {
  DiscoveryGraph g;
  g.b_bins = cfg.b_bins;
  g.devices = devices;
  g.bins_of.reserve(devices.size());
  for (std::uint64_t d : devices) {
    g.bins_of.push_back(provider.signature(d).bins);
  }
  return g;
}

struct ComponentCensus {
  int component_count = 0;  // components containing at least one device
  int tree_components = 0;
  int unicyclic_components = 0;
  int multicyclic_components = 0;
  int max_device_count = 0;  // devices in the largest component
  bool all_tree_or_unicyclic = true;
};

// Union-find over bins. In the bipartite graph (bins and devices both count
// as vertices, one edge per device-bin incidence) a component with e edges,
// v bins, and d devices has cycle rank e - (v + d) + 1: 0 means tree, 1
// means exactly one cycle.
inline ComponentCensus classify_components(const DiscoveryGraph& g) {
  std::vector<int> parent(g.b_bins);
  for (int i = 0; i < g.b_bins; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& bins : g.bins_of) {
    if (bins.empty()) throw std::invalid_argument("device with no bins");
    const int r0 = find(bins[0]);
    for (std::size_t j = 1; j < bins.size(); ++j) parent[find(bins[j])] = r0;
  }

  std::vector<int> edge_endpoints(g.b_bins, 0);
  std::vector<int> device_count(g.b_bins, 0);
  std::vector<std::uint8_t> bin_touched(g.b_bins, 0);
  for (const auto& bins : g.bins_of) {
    const int r = find(bins[0]);
    edge_endpoints[r] += static_cast<int>(bins.size());
    device_count[r] += 1;
    for (int b : bins) bin_touched[b] = 1;
  }
  std::vector<int> bin_count(g.b_bins, 0);
  for (int b = 0; b < g.b_bins; ++b) {
    if (bin_touched[b]) bin_count[find(b)] += 1;
  }

  ComponentCensus census;
  for (int r = 0; r < g.b_bins; ++r) {
    if (device_count[r] == 0 || find(r) != r) continue;
    ++census.component_count;
    census.max_device_count = std::max(census.max_device_count,
                                       device_count[r]);
    const int cycle_rank =
        edge_endpoints[r] - (bin_count[r] + device_count[r]) + 1;
    if (cycle_rank <= 0) {
      ++census.tree_components;
    } else if (cycle_rank == 1) {
      ++census.unicyclic_components;
    } else {
      ++census.multicyclic_components;
      census.all_tree_or_unicyclic = false;
    }
  }
  return census;
}

// Devices recoverable by repeatedly resolving bins that currently hold
// exactly one remaining device. Returns them in ascending device order. The
// result is a fixed point of the removal process, so it does not depend on
// the order bins are drained in.
inline std::vector<std::uint64_t> peel(const DiscoveryGraph& g) {
  std::vector<std::vector<int>> bin_devices(g.b_bins);
  for (std::size_t d = 0; d < g.devices.size(); ++d) {
    for (int b : g.bins_of[d]) bin_devices[b].push_back(static_cast<int>(d));
  }
  std::vector<int> load(g.b_bins, 0);
  for (int b = 0; b < g.b_bins; ++b)
    load[b] = static_cast<int>(bin_devices[b].size());

  std::vector<std::uint8_t> removed(g.devices.size(), 0);
  std::deque<int> ready;
  for (int b = 0; b < g.b_bins; ++b)
    if (load[b] == 1) ready.push_back(b);

  while (!ready.empty()) {
    const int b = ready.front();
    ready.pop_front();
    if (load[b] != 1) continue;
    int dev = -1;
    for (int d : bin_devices[b]) {
      if (!removed[d]) {
        dev = d;
        break;
      }
    }
    if (dev < 0) continue;
    removed[dev] = 1;
    for (int b2 : g.bins_of[dev]) {
      if (--load[b2] == 1) ready.push_back(b2);
    }
  }

  std::vector<std::uint64_t> out;
  for (std::size_t d = 0; d < g.devices.size(); ++d) {
    if (removed[d]) out.push_back(g.devices[d]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sofdm
