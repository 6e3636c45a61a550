#include "pregi/image_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pregi {

namespace fs = std::filesystem;

std::string format_double(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // use the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec)
  {
    char shorter[64];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

namespace {

struct MhdHeader {
  int ndims = 0;
  std::vector<int> dim_size;
  std::vector<double> spacing;
  std::vector<double> offset;
  std::string element_type;
  std::string data_file;
};

void write_mhd_header(const std::string& path, const MhdHeader& h)
{
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "ObjectType = Image\n";
  out << "NDims = " << h.ndims << "\n";
  out << "BinaryData = True\n";
  out << "BinaryDataByteOrderMSB = False\n";
  out << "DimSize =";
  for (int d : h.dim_size) out << " " << d;
  out << "\nElementSpacing =";
  for (double s : h.spacing) out << " " << format_double(s);
  out << "\nOffset =";
  for (double o : h.offset) out << " " << format_double(o);
  out << "\nElementType = " << h.element_type << "\n";
  out << "ElementDataFile = " << h.data_file << "\n";
  if (!out) throw IoError("write failed: " + path);
}

MhdHeader read_mhd_header(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  MhdHeader h;
  std::string line;
  while (std::getline(in, line))
  {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    std::istringstream vs(value);
    if (key == "NDims")
    {
      vs >> h.ndims;
    }
    else if (key == "DimSize")
    {
      int d;
      while (vs >> d) h.dim_size.push_back(d);
    }
    else if (key == "ElementSpacing")
    {
      double s;
      while (vs >> s) h.spacing.push_back(s);
    }
    else if (key == "Offset")
    {
      double o;
      while (vs >> o) h.offset.push_back(o);
    }
    else if (key == "ElementType")
    {
      h.element_type = value;
    }
    else if (key == "ElementDataFile")
    {
      h.data_file = value;
    }
  }
  if (h.ndims == 0 || h.dim_size.empty() || h.element_type.empty() || h.data_file.empty())
  {
    throw IoError("malformed header: " + path);
  }
  return h;
}

std::string raw_path_for(const std::string& header_path)
{
  fs::path p(header_path);
  p.replace_extension(".raw");
  return p.string();
}

template <typename T>
void write_raw(const std::string& path, const std::vector<T>& data)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(T)));
  if (!out) throw IoError("write failed: " + path);
}

template <typename T>
void read_raw(const std::string& path, std::vector<T>& data, size_t count)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  data.resize(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
  if (static_cast<size_t>(in.gcount()) != count * sizeof(T))
  {
    throw IoError("raw file too short: " + path);
  }
}

template <typename T>
Grid3<T> read_grid3(const std::string& header_path, const std::string& expected_type)
{
  const MhdHeader h = read_mhd_header(header_path);
  if (h.ndims != 3) throw IoError("expected 3D image: " + header_path);
  if (h.element_type != expected_type)
  {
    throw IoError("expected " + expected_type + " data: " + header_path);
  }
  Grid3<T> grid;
  grid.dims = {h.dim_size[0], h.dim_size[1], h.dim_size[2]};
  grid.spacing = Vec3(h.spacing[0], h.spacing[1], h.spacing[2]);
  grid.origin = h.offset.size() == 3 ? Vec3(h.offset[0], h.offset[1], h.offset[2]) : Vec3::Zero();
  const fs::path raw = fs::path(header_path).parent_path() / h.data_file;
  read_raw(raw.string(), grid.data,
           static_cast<size_t>(grid.dims[0]) * grid.dims[1] * grid.dims[2]);
  return grid;
}

template <typename T>
void write_grid3(const std::string& header_path, const Grid3<T>& grid, const std::string& type)
{
  const std::string raw = raw_path_for(header_path);
  MhdHeader h;
  h.ndims = 3;
  h.dim_size = {grid.dims[0], grid.dims[1], grid.dims[2]};
  h.spacing = {grid.spacing.x(), grid.spacing.y(), grid.spacing.z()};
  h.offset = {grid.origin.x(), grid.origin.y(), grid.origin.z()};
  h.element_type = type;
  h.data_file = fs::path(raw).filename().string();
  write_mhd_header(header_path, h);
  write_raw(raw, grid.data);
}

}  // namespace

void write_volume(const std::string& header_path, const Volume3D& vol)
{
  write_grid3(header_path, vol, "MET_FLOAT");
}

Volume3D read_volume(const std::string& header_path)
{
  return read_grid3<float>(header_path, "MET_FLOAT");
}

void write_labels(const std::string& header_path, const LabelVolume& labels)
{
  write_grid3(header_path, labels, "MET_USHORT");
}

LabelVolume read_labels(const std::string& header_path)
{
  return read_grid3<uint16_t>(header_path, "MET_USHORT");
}

void write_image(const std::string& header_path, const Image2D& img)
{
  const std::string raw = raw_path_for(header_path);
  MhdHeader h;
  h.ndims = 2;
  h.dim_size = {img.cols, img.rows};
  h.spacing = {img.pixel_spacing, img.pixel_spacing};
  h.offset = {0.0, 0.0};
  h.element_type = "MET_FLOAT";
  h.data_file = fs::path(raw).filename().string();
  write_mhd_header(header_path, h);
  write_raw(raw, img.data);
}

Image2D read_image(const std::string& header_path)
{
  const MhdHeader h = read_mhd_header(header_path);
  if (h.ndims != 2) throw IoError("expected 2D image: " + header_path);
  if (h.element_type != "MET_FLOAT") throw IoError("expected MET_FLOAT data: " + header_path);
  Image2D img(h.dim_size[1], h.dim_size[0], h.spacing[0]);
  const fs::path raw = fs::path(header_path).parent_path() / h.data_file;
  read_raw(raw.string(), img.data, img.size());
  return img;
}

void write_pose(const std::string& path, const RigidPose& pose)
{
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const Mat4 m = pose.matrix();
  for (int r = 0; r < 4; ++r)
  {
    for (int c = 0; c < 4; ++c)
    {
      out << format_double(m(r, c)) << (c == 3 ? "\n" : " ");
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

RigidPose read_pose(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  Mat4 m;
  for (int r = 0; r < 4; ++r)
  {
    for (int c = 0; c < 4; ++c)
    {
      if (!(in >> m(r, c))) throw IoError("malformed pose file: " + path);
    }
  }
  return RigidPose::from_matrix(m);
}

void write_named_points(const std::string& path,
                        const std::vector<std::pair<std::string, Vec3>>& points)
{
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& [name, p] : points)
  {
    out << name << " " << format_double(p.x()) << " " << format_double(p.y()) << " "
        << format_double(p.z()) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::pair<std::string, Vec3>> read_named_points(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::pair<std::string, Vec3>> points;
  std::string name;
  double x, y, z;
  while (in >> name >> x >> y >> z) points.emplace_back(name, Vec3(x, y, z));
  return points;
}

void write_camera(const std::string& path, const CameraModel& camera)
{
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "sdd " << format_double(camera.source_to_detector) << "\n";
  out << "rows " << camera.detector_rows << "\n";
  out << "cols " << camera.detector_cols << "\n";
  out << "spacing " << format_double(camera.pixel_spacing) << "\n";
  out << "pp " << format_double(camera.principal_point.x()) << " "
      << format_double(camera.principal_point.y()) << "\n";
  out << "extrinsic\n";
  const Mat4 m = camera.extrinsic.matrix();
  for (int r = 0; r < 4; ++r)
  {
    for (int c = 0; c < 4; ++c)
    {
      out << format_double(m(r, c)) << (c == 3 ? "\n" : " ");
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

CameraModel read_camera(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  CameraModel cam;
  std::string key;
  while (in >> key)
  {
    if (key == "sdd") in >> cam.source_to_detector;
    else if (key == "rows") in >> cam.detector_rows;
    else if (key == "cols") in >> cam.detector_cols;
    else if (key == "spacing") in >> cam.pixel_spacing;
    else if (key == "pp") in >> cam.principal_point.x() >> cam.principal_point.y();
    else if (key == "extrinsic")
    {
      Mat4 m;
      for (int r = 0; r < 4; ++r)
      {
        for (int c = 0; c < 4; ++c)
        {
          if (!(in >> m(r, c))) throw IoError("malformed camera file: " + path);
        }
      }
      cam.extrinsic = RigidPose::from_matrix(m);
    }
    else
    {
      throw IoError("unknown camera key '" + key + "' in " + path);
    }
  }
  if (cam.source_to_detector <= 0.0 || cam.pixel_spacing <= 0.0 ||
      cam.detector_rows <= 0 || cam.detector_cols <= 0)
  {
    throw IoError("invalid camera geometry: " + path);
  }
  return cam;
}

}  // namespace pregi
