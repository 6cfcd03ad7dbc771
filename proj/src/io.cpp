#include "cfmcast/io.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace cfmcast {

using nlohmann::json;

std::string realization_json(const NetworkRealization& net) {
  json doc;
  doc["num_aps"] = net.num_aps;
  doc["num_antennas"] = net.num_antennas;
  doc["num_ues"] = net.num_ues;
  doc["side_length_m"] = net.side_length;
  auto positions = [](const Mat& m) {
    json arr = json::array();
    for (int i = 0; i < m.rows(); ++i) arr.push_back({m(i, 0), m(i, 1)});
    return arr;
  };
  doc["ap_positions_m"] = positions(net.ap_positions);
  doc["ue_positions_m"] = positions(net.ue_positions);
  json gains = json::array();
  for (int k = 0; k < net.num_ues; ++k) {
    json row = json::array();
    for (int l = 0; l < net.num_aps; ++l) {
      row.push_back(10.0 * std::log10(net.gains(k, l)));
    }
    gains.push_back(row);
  }
  doc["gain_db"] = gains;
  json noise = json::array();
  for (int k = 0; k < net.num_ues; ++k) {
    noise.push_back(10.0 * std::log10(net.noise_var(k) * 1e3));
  }
  doc["noise_dbm"] = noise;
  return doc.dump(2);
}

void write_channel_sidecar(const NetworkRealization& net,
                           const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  for (int k = 0; k < net.num_ues; ++k) {
    for (int l = 0; l < net.num_aps; ++l) {
      for (int a = 0; a < net.num_antennas; ++a) {
        const double re = net.channels[k][l](a).real();
        const double im = net.channels[k][l](a).imag();
        os.write(reinterpret_cast<const char*>(&re), sizeof(double));
        os.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
    }
  }
}

std::vector<std::vector<VecC>> read_channel_sidecar(const std::string& path,
                                                    int num_ues, int num_aps,
                                                    int num_antennas) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<VecC>> out(num_ues,
                                     std::vector<VecC>(num_aps));
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < num_aps; ++l) {
      VecC h(num_antennas);
      for (int a = 0; a < num_antennas; ++a) {
        double re = 0.0;
        double im = 0.0;
        is.read(reinterpret_cast<char*>(&re), sizeof(double));
        is.read(reinterpret_cast<char*>(&im), sizeof(double));
        h(a) = {re, im};
      }
      out[k][l] = h;
    }
  }
  if (!is) throw std::runtime_error("sidecar truncated: " + path);
  return out;
}

}  // namespace cfmcast
