/**
 * @file stream_io.cpp
 * @brief JSON Lines serialization of SensorStream.
 */

#include <drs/stream_io.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace drs {

using nlohmann::json;

namespace {

json vec(const Vec3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

json rot(const Rotation& r)
{
    json a = json::array();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            a.push_back(r.matrix()(i, j));
    return a;
}

template <std::size_t N>
std::array<double, N> readArray(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string("missing field '") + key + "'");
    if (!it->is_array() || it->size() != N)
        throw std::invalid_argument(std::string("field '") + key + "' must be an array of " + std::to_string(N)
                                    + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!(*it)[i].is_number())
            throw std::invalid_argument(std::string("field '") + key + "' must contain numbers");
        out[i] = (*it)[i].get<double>();
    }
    return out;
}

Vec3 readVec(const json& j, const char* key)
{
    const auto a = readArray<3>(j, key);
    return Vec3(a[0], a[1], a[2]);
}

Rotation readRot(const json& j, const char* key)
{
    const auto a = readArray<9>(j, key);
    Mat3 m;
    m << a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8];
    return Rotation(m);
}

double readNumber(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw std::invalid_argument(std::string("missing or non-numeric field '") + key + "'");
    return it->get<double>();
}

const char* kindOf(const Event& e)
{
    return std::visit(
        [](const auto& ev) -> const char* {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, ImuStep>)
                return "imu";
            else if constexpr (std::is_same_v<T, FkPosition>)
                return "fk_pos";
            else if constexpr (std::is_same_v<T, FkOrientation>)
                return "fk_rot";
            else if constexpr (std::is_same_v<T, SurfacePose>)
                return "surface";
            else if constexpr (std::is_same_v<T, SwapEvent>)
                return "swap";
            else
                return "truth";
        },
        e);
}

}  // namespace

std::string toJsonLine(const Event& e)
{
    json j;
    j["kind"] = kindOf(e);
    j["t"] = eventTime(e);
    std::visit(
        [&j](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, ImuStep>) {
                j["dt"] = ev.dt;
                j["gyro"] = vec(ev.gyro);
                j["accel"] = vec(ev.accel);
                j["contact_vel"] = vec(ev.contact_vel);
            } else if constexpr (std::is_same_v<T, FkPosition>) {
                j["hp"] = vec(ev.hp);
            } else if constexpr (std::is_same_v<T, FkOrientation>) {
                j["R"] = rot(ev.foot_rot_in_base);
            } else if constexpr (std::is_same_v<T, SurfacePose>) {
                j["R"] = rot(ev.rot);
                j["omega"] = vec(ev.omega);
            } else if constexpr (std::is_same_v<T, SwapEvent>) {
                j["h_d"] = vec(ev.h_d);
            } else {
                j["R"] = rot(ev.x.rot);
                j["v"] = vec(ev.x.velocity());
                j["p"] = vec(ev.x.position());
                j["d"] = vec(ev.x.foot());
            }
        },
        e);
    return j.dump();
}

Event fromJsonLine(const std::string& line, std::size_t line_number)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& err) {
        throw StreamError(line_number, std::string("malformed JSON: ") + err.what());
    }
    try {
        if (!j.is_object())
            throw std::invalid_argument("record is not a JSON object");
        const auto kit = j.find("kind");
        if (kit == j.end() || !kit->is_string())
            throw std::invalid_argument("missing field 'kind'");
        const std::string kind = kit->get<std::string>();
        const double t = readNumber(j, "t");
        if (kind == "imu") {
            ImuStep u;
            u.t = t;
            u.dt = readNumber(j, "dt");
            u.gyro = readVec(j, "gyro");
            u.accel = readVec(j, "accel");
            u.contact_vel = readVec(j, "contact_vel");
            return u;
        }
        if (kind == "fk_pos")
            return FkPosition{t, readVec(j, "hp")};
        if (kind == "fk_rot")
            return FkOrientation{t, readRot(j, "R")};
        if (kind == "surface")
            return SurfacePose{t, readRot(j, "R"), readVec(j, "omega")};
        if (kind == "swap")
            return SwapEvent{t, readVec(j, "h_d")};
        if (kind == "truth") {
            TruthSample s;
            s.t = t;
            s.x = GroupElement::fromParts(readRot(j, "R"), readVec(j, "v"), readVec(j, "p"), readVec(j, "d"));
            return s;
        }
        throw std::invalid_argument("unknown kind '" + kind + "'");
    } catch (const std::invalid_argument& err) {
        throw StreamError(line_number, err.what());
    } catch (const json::exception& err) {
        throw StreamError(line_number, err.what());
    }
}

void writeStream(std::ostream& os, const SensorStream& stream)
{
    for (const auto& e : stream.events)
        os << toJsonLine(e) << '\n';
}

SensorStream readStream(std::istream& is)
{
    SensorStream stream;
    std::map<std::size_t, double> last_t;  // by variant index
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty())
            continue;
        Event e = fromJsonLine(line, n);
        const double t = eventTime(e);
        const auto it = last_t.find(e.index());
        if (it != last_t.end() && !(t > it->second))
            throw StreamError(n, std::string("out-of-order '") + kindOf(e) + "' record: t=" + std::to_string(t)
                                     + " does not follow " + std::to_string(it->second));
        last_t[e.index()] = t;
        stream.events.push_back(std::move(e));
    }
    return stream;
}

void writeStreamFile(const std::string& path, const SensorStream& stream)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open '" + tmp + "' for writing");
        writeStream(os, stream);
        if (!os)
            throw std::runtime_error("write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

SensorStream readStreamFile(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open '" + path + "'");
    return readStream(is);
}

}  // namespace drs
