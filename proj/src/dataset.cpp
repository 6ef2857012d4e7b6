/*
 Copyright 2026 The quadlearn Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "quadlearn/learner.hpp"

namespace quadlearn {

namespace {
constexpr const char* kHeader = "t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,u0,u1,u2,u3";
constexpr int kColumns = 18;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LearnerError("cannot write " + path.string());
    out << kHeader << '\n';
    for (const auto& s : traj.samples) {
        const StateVector x = s.x.to_vector();
        out << format_double(s.t);
        for (int i = 0; i < kStateDim; ++i) out << ',' << format_double(x(i));
        for (int i = 0; i < kControlDim; ++i) out << ',' << format_double(s.u(i));
        out << '\n';
    }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LearnerError("cannot read " + path.string());
    Trajectory traj;
    traj.name = path.stem().string();
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw LearnerError(path.string() + ": missing or unexpected header");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double values[kColumns];
        int count = 0;
        std::size_t pos = 0;
        while (pos <= line.size() && count < kColumns) {
            const std::size_t end = std::min(line.find(',', pos), line.size());
            const auto res = std::from_chars(line.data() + pos, line.data() + end, values[count]);
            if (res.ec != std::errc{} || res.ptr != line.data() + end) {
                throw LearnerError(path.string() + ":" + std::to_string(line_no) + ": bad number in column " +
                                   std::to_string(count + 1));
            }
            ++count;
            pos = end + 1;
        }
        if (count != kColumns || pos <= line.size()) {
            throw LearnerError(path.string() + ":" + std::to_string(line_no) + ": expected 18 columns");
        }
        TrajectorySample s;
        s.t = values[0];
        s.x = State::from_vector(Eigen::Map<const StateVector>(values + 1));
        s.u = Eigen::Map<const Control>(values + 14);
        traj.samples.push_back(s);
    }
    return traj;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LearnerError("cannot read " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace quadlearn
