/**
 * @file stream_io.hpp
 * @brief JSON Lines serialization of SensorStream.
 *
 * One record per line, each an object with "kind" and "t" (seconds):
 *
 *   imu      dt, gyro[3], accel[3], contact_vel[3]
 *   fk_pos   hp[3]
 *   fk_rot   R[9]                       foot orientation in the base frame
 *   surface  R[9], omega[3]             surface orientation and rate, world frame
 *   swap     h_d[3]
 *   truth    R[9], v[3], p[3], d[3]
 *
 * Rotations are 9 reals in row-major order. Timestamps must be strictly
 * increasing within each kind.
 */

#pragma once

#include <drs/sim.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace drs {

class StreamError : public std::runtime_error
{
public:
    StreamError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::string toJsonLine(const Event& e);
Event fromJsonLine(const std::string& line, std::size_t line_number = 0);

void writeStream(std::ostream& os, const SensorStream& stream);
/// Throws StreamError with the 1-based line number on malformed or out-of-order records.
SensorStream readStream(std::istream& is);

void writeStreamFile(const std::string& path, const SensorStream& stream);
SensorStream readStreamFile(const std::string& path);

}  // namespace drs
