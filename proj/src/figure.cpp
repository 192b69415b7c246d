#include "vvcm/figure.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vvcm/scene_file.hpp"

namespace vvcm {

namespace {

constexpr double kPageW = 720.0;
constexpr double kPageH = 380.0;

struct Rgb {
  double r, g, b;
};

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrey{0.55, 0.55, 0.55};
constexpr Rgb kBlue{0.1, 0.3, 0.8};
constexpr Rgb kRed{0.85, 0.1, 0.1};

struct Shape {
  enum Kind { Line, Polygon, Dot, Cross, Text } kind;
  std::vector<Vec2> pts;  // page coordinates, y up
  double size = 1.0;      // line width, dot radius, cross half-size or font size
  Rgb color = kBlack;
  std::string text;
  std::string role;  // SVG class
};

using Page = std::vector<Shape>;

// Maps a bounding box into a panel with equal aspect ratio.
struct Viewport {
  Vec2 lo, hi;
  Vec2 origin;
  double scale = 1.0;

  Viewport(std::vector<Vec2> pts, double x0, double y0, double w, double h) {
    lo = hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 span = (hi - lo).cwiseMax(1e-6);
    scale = std::min(w / span.x(), h / span.y());
    origin = Vec2(x0 + 0.5 * (w - scale * span.x()), y0 + 0.5 * (h - scale * span.y()));
  }
  Vec2 operator()(const Vec2& p) const { return origin + scale * (p - lo); }
};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string vec_text(const double* v, int n) {
  std::string s = "(";
  for (int i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

Page build_page(const Scene& scene, const Solution* s, std::size_t index, std::size_t total) {
  Page page;
  const double panel = kPageW / 2.0;
  const double margin = 30.0;
  const double top = kPageH - 60.0;

  std::string title = "scene, no solutions";
  if (s) {
    title = "solution " + std::to_string(index + 1) + "/" + std::to_string(total) + "  taut set " +
            s->taut_set.to_string() + "  p_o = " + vec_text(s->p_o.data(), 3) + " m";
  }
  page.push_back({Shape::Text, {Vec2(margin, kPageH - 25.0)}, 11.0, kBlack, title, "title"});
  page.push_back({Shape::Text, {Vec2(margin, top + 12.0)}, 9.0, kGrey, "world frame", "label"});
  page.push_back({Shape::Text, {Vec2(panel + margin, top + 12.0)}, 9.0, kGrey, "sheet frame", "label"});

  // World panel.
  std::vector<Vec2> world = scene.robots();
  if (s) world.push_back(s->p_o.head<2>());
  const Viewport wv(world, margin, margin, panel - 2 * margin, top - 2 * margin);
  if (s) {
    for (int i : s->taut_set.indices()) {
      page.push_back({Shape::Line, {wv(scene.robot(i)), wv(s->p_o.head<2>())}, 1.2, kBlue, "", "taut-world"});
    }
  }
  for (int i = 0; i < scene.n(); ++i) {
    const Vec2 p = wv(scene.robot(i));
    page.push_back({Shape::Dot, {p}, 3.0, kBlack, "", "robot"});
    page.push_back({Shape::Text, {p + Vec2(4, 4)}, 8.0, kBlack, std::to_string(i + 1), "robot-label"});
  }
  if (s) page.push_back({Shape::Cross, {wv(s->p_o.head<2>())}, 5.0, kRed, "", "r_o"});

  // Sheet panel.
  const Viewport sv(scene.sheet_vertices(), panel + margin, margin, panel - 2 * margin, top - 2 * margin);
  std::vector<Vec2> outline;
  for (const auto& v : scene.sheet_vertices()) outline.push_back(sv(v));
  page.push_back({Shape::Polygon, outline, 0.8, kGrey, "", "sheet"});
  if (s) {
    for (int i : s->taut_set.indices()) {
      page.push_back({Shape::Line, {sv(scene.vertex(i)), sv(s->v_o)}, 1.2, kBlue, "", "taut-sheet"});
    }
  }
  for (int i = 0; i < scene.n(); ++i) {
    const Vec2 p = sv(scene.vertex(i));
    page.push_back({Shape::Dot, {p}, 2.5, kBlack, "", "vertex"});
    page.push_back({Shape::Text, {p + Vec2(4, 4)}, 8.0, kBlack, std::to_string(i + 1), "vertex-label"});
  }
  if (s) page.push_back({Shape::Cross, {sv(s->v_o)}, 5.0, kRed, "", "v_o"});
  return page;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_color(const Rgb& c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(c.r * 255 + 0.5),
                static_cast<int>(c.g * 255 + 0.5), static_cast<int>(c.b * 255 + 0.5));
  return buf;
}

std::string to_svg(const std::vector<Page>& pages) {
  std::ostringstream out;
  const double height = kPageH * static_cast<double>(pages.size());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kPageW) << "\" height=\"" << fixed(height)
      << "\" viewBox=\"0 0 " << fixed(kPageW) << " " << fixed(height) << "\">\n";
  for (size_t p = 0; p < pages.size(); ++p) {
    const double base = kPageH * static_cast<double>(p + 1);
    auto X = [](const Vec2& v) { return fixed(v.x()); };
    auto Y = [&](const Vec2& v) { return fixed(base - v.y()); };
    out << "<g class=\"page\" id=\"page-" << p + 1 << "\">\n"
        << "<rect x=\"0\" y=\"" << fixed(base - kPageH) << "\" width=\"" << fixed(kPageW) << "\" height=\""
        << fixed(kPageH) << "\" fill=\"white\" stroke=\"#dddddd\"/>\n";
    for (const auto& s : pages[p]) {
      const std::string color = svg_color(s.color);
      switch (s.kind) {
        case Shape::Line:
          out << "<line class=\"" << s.role << "\" x1=\"" << X(s.pts[0]) << "\" y1=\"" << Y(s.pts[0]) << "\" x2=\""
              << X(s.pts[1]) << "\" y2=\"" << Y(s.pts[1]) << "\" stroke=\"" << color << "\" stroke-width=\""
              << fixed(s.size) << "\"/>\n";
          break;
        case Shape::Polygon:
          out << "<polygon class=\"" << s.role << "\" points=\"";
          for (size_t i = 0; i < s.pts.size(); ++i) out << (i ? " " : "") << X(s.pts[i]) << "," << Y(s.pts[i]);
          out << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fixed(s.size) << "\"/>\n";
          break;
        case Shape::Dot:
          out << "<circle class=\"" << s.role << "\" cx=\"" << X(s.pts[0]) << "\" cy=\"" << Y(s.pts[0]) << "\" r=\""
              << fixed(s.size) << "\" fill=\"" << color << "\"/>\n";
          break;
        case Shape::Cross: {
          const Vec2 c = s.pts[0];
          const double h = s.size;
          out << "<path class=\"" << s.role << "\" d=\"M" << X(c + Vec2(-h, -h)) << "," << Y(c + Vec2(-h, -h)) << " L"
              << X(c + Vec2(h, h)) << "," << Y(c + Vec2(h, h)) << " M" << X(c + Vec2(-h, h)) << ","
              << Y(c + Vec2(-h, h)) << " L" << X(c + Vec2(h, -h)) << "," << Y(c + Vec2(h, -h)) << "\" stroke=\""
              << color << "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
          break;
        }
        case Shape::Text:
          out << "<text class=\"" << s.role << "\" x=\"" << X(s.pts[0]) << "\" y=\"" << Y(s.pts[0])
              << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"" << fixed(s.size) << "\" fill=\""
              << color << "\">" << escape_xml(s.text) << "</text>\n";
          break;
      }
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string escape_pdf(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '(' || c == ')' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string pdf_stream(const Page& page) {
  std::ostringstream out;
  auto rgb = [&](const Rgb& c, const char* op) {
    out << fixed(c.r) << ' ' << fixed(c.g) << ' ' << fixed(c.b) << ' ' << op << '\n';
  };
  auto pt = [&](const Vec2& v) { out << fixed(v.x()) << ' ' << fixed(v.y()); };
  for (const auto& s : page) {
    switch (s.kind) {
      case Shape::Line:
        rgb(s.color, "RG");
        out << fixed(s.size) << " w\n";
        pt(s.pts[0]);
        out << " m ";
        pt(s.pts[1]);
        out << " l S\n";
        break;
      case Shape::Polygon:
        rgb(s.color, "RG");
        out << fixed(s.size) << " w\n";
        for (size_t i = 0; i < s.pts.size(); ++i) {
          pt(s.pts[i]);
          out << (i ? " l\n" : " m\n");
        }
        out << "s\n";
        break;
      case Shape::Dot: {
        // Circle from four Bezier arcs.
        constexpr double kappa = 0.5523;
        const Vec2 c = s.pts[0];
        const double r = s.size, k = kappa * r;
        rgb(s.color, "rg");
        pt(c + Vec2(r, 0));
        out << " m\n";
        const Vec2 ctrl[4][3] = {{{r, k}, {k, r}, {0, r}},
                                 {{-k, r}, {-r, k}, {-r, 0}},
                                 {{-r, -k}, {-k, -r}, {0, -r}},
                                 {{k, -r}, {r, -k}, {r, 0}}};
        for (const auto& arc : ctrl) {
          for (const auto& q : arc) {
            pt(c + q);
            out << ' ';
          }
          out << "c\n";
        }
        out << "f\n";
        break;
      }
      case Shape::Cross: {
        const Vec2 c = s.pts[0];
        const double h = s.size;
        rgb(s.color, "RG");
        out << "1.5 w\n";
        pt(c + Vec2(-h, -h));
        out << " m ";
        pt(c + Vec2(h, h));
        out << " l S\n";
        pt(c + Vec2(-h, h));
        out << " m ";
        pt(c + Vec2(h, -h));
        out << " l S\n";
        break;
      }
      case Shape::Text:
        rgb(s.color, "rg");
        out << "BT /F1 " << fixed(s.size) << " Tf ";
        pt(s.pts[0]);
        out << " Td (" << escape_pdf(s.text) << ") Tj ET\n";
        break;
    }
  }
  return out.str();
}

std::string to_pdf(const std::vector<Page>& pages) {
  std::vector<std::string> objects;  // object i + 1
  objects.push_back("<< /Type /Catalog /Pages 2 0 R >>");
  std::string kids;
  for (size_t p = 0; p < pages.size(); ++p) kids += (p ? " " : "") + std::to_string(4 + 2 * p) + " 0 R";
  objects.push_back("<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(pages.size()) + " >>");
  objects.push_back("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>");
  for (size_t p = 0; p < pages.size(); ++p) {
    objects.push_back("<< /Type /Page /Parent 2 0 R /MediaBox [0 0 " + fixed(kPageW) + " " + fixed(kPageH) +
                      "] /Resources << /Font << /F1 3 0 R >> >> /Contents " + std::to_string(5 + 2 * p) + " 0 R >>");
    const std::string content = pdf_stream(pages[p]);
    objects.push_back("<< /Length " + std::to_string(content.size()) + " >>\nstream\n" + content + "endstream");
  }

  std::string out = "%PDF-1.4\n";
  std::vector<size_t> offsets;
  for (size_t i = 0; i < objects.size(); ++i) {
    offsets.push_back(out.size());
    out += std::to_string(i + 1) + " 0 obj\n" + objects[i] + "\nendobj\n";
  }
  const size_t xref = out.size();
  out += "xref\n0 " + std::to_string(objects.size() + 1) + "\n0000000000 65535 f \n";
  for (size_t off : offsets) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%010zu 00000 n \n", off);
    out += buf;
  }
  out += "trailer\n<< /Size " + std::to_string(objects.size() + 1) + " /Root 1 0 R >>\nstartxref\n" +
         std::to_string(xref) + "\n%%EOF\n";
  return out;
}

}  // namespace

std::string render_figure(const Scene& scene, const std::vector<Solution>& solutions, FigureFormat format) {
  std::vector<Page> pages;
  if (solutions.empty()) {
    pages.push_back(build_page(scene, nullptr, 0, 0));
  } else {
    for (size_t i = 0; i < solutions.size(); ++i) pages.push_back(build_page(scene, &solutions[i], i, solutions.size()));
  }
  return format == FigureFormat::Svg ? to_svg(pages) : to_pdf(pages);
}

void emit_figure(const Scene& scene, const std::vector<Solution>& solutions, const std::string& path) {
  std::string ext = path.size() >= 4 ? path.substr(path.size() - 4) : "";
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  const FigureFormat format = ext == ".svg" ? FigureFormat::Svg : FigureFormat::Pdf;
  const std::string data = render_figure(scene, solutions, format);
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    throw IoError("cannot write figure '" + path + "'");
  }
}

}  // namespace vvcm
