#include "pqcsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pqcsim/mc_engine.hpp"

namespace pqcsim::svg {

namespace {

constexpr double W = 820, H = 480, L = 80, R = 30, T = 50, B = 110;
const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

std::string num(double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
}

class Canvas {
public:
    Canvas(const Axes& a, double xmin, double xmax, double ymin, double ymax) : a_(a), x0_(xmin), x1_(xmax) {
        if (a.log_y) {
            ymin = std::max(ymin, 1e-12);
            ymax = std::max(ymax, ymin * 10);
            y0_ = std::floor(std::log10(ymin));
            y1_ = std::ceil(std::log10(ymax));
        } else {
            y0_ = std::min(0.0, ymin);
            y1_ = ymax > y0_ ? ymax * 1.05 : y0_ + 1.0;
        }
        if (x1_ <= x0_) x1_ = x0_ + 1.0;
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
             << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" << esc(a.title)
             << "</text>\n";
        out_ << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
             << "\" stroke=\"black\"/>\n";
        out_ << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
             << "\" stroke=\"black\"/>\n";
        out_ << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
             << esc(a.xlabel) << "</text>\n";
        out_ << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
             << esc(a.ylabel) << "</text>\n";
        y_ticks();
    }

    double px(double x) const { return L + (x - x0_) / (x1_ - x0_) * (W - L - R); }
    double py(double y) const {
        double v = a_.log_y ? std::log10(std::max(y, 1e-12)) : y;
        v = std::clamp(v, y0_, y1_);
        return H - B - (v - y0_) / (y1_ - y0_) * (H - T - B);
    }

    void x_ticks() {
        for (int i = 0; i <= 5; ++i) {
            double x = x0_ + (x1_ - x0_) * i / 5.0;
            out_ << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(x)
                 << "</text>\n";
        }
    }

    void hline() {
        if (!a_.hline) return;
        double y = py(*a_.hline);
        out_ << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << W - R << "\" y2=\"" << y
             << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
        if (!a_.hline_label.empty())
            out_ << "<text x=\"" << W - R - 4 << "\" y=\"" << y - 4 << "\" text-anchor=\"end\" fill=\"red\">"
                 << esc(a_.hline_label) << "</text>\n";
    }

    std::ostringstream& raw() { return out_; }

    void save(const std::string& path) {
        out_ << "</svg>\n";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << out_.str();
    }

private:
    void y_ticks() {
        if (a_.log_y) {
            for (double e = y0_; e <= y1_; e += 1.0) {
                double y = H - B - (e - y0_) / (y1_ - y0_) * (H - T - B);
                out_ << "<line x1=\"" << L - 4 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
                     << "\" stroke=\"black\"/>\n";
                out_ << "<text x=\"" << L - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
            }
            return;
        }
        for (int i = 0; i <= 5; ++i) {
            double v = y0_ + (y1_ - y0_) * i / 5.0;
            double y = py(v);
            out_ << "<line x1=\"" << L - 4 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
                 << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << L - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
        }
    }

    const Axes& a_;
    double x0_, x1_, y0_ = 0, y1_ = 1;
    std::ostringstream out_;
};

void category_label(std::ostringstream& o, double x, const std::string& s) {
    o << "<text transform=\"translate(" << x << "," << H - B + 14 << ") rotate(35)\">" << esc(s) << "</text>\n";
}

}  // namespace

void bar_chart(const std::string& path, const Axes& axes, const std::vector<std::string>& labels,
               const std::vector<double>& values) {
    if (values.empty()) return;
    double ymax = *std::max_element(values.begin(), values.end());
    double ymin = *std::min_element(values.begin(), values.end());
    if (axes.hline) ymax = std::max(ymax, *axes.hline);
    Canvas c(axes, 0.0, double(values.size()), ymin, ymax);
    double slot = (W - L - R) / values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        double x = L + slot * i + slot * 0.15;
        double top = c.py(values[i]);
        double base = c.py(axes.log_y ? 1e-300 : 0.0);
        c.raw() << "<rect x=\"" << x << "\" y=\"" << std::min(top, base) << "\" width=\"" << slot * 0.7
                << "\" height=\"" << std::abs(base - top) << "\" fill=\"" << kPalette[i % 8] << "\"/>\n";
        category_label(c.raw(), x + slot * 0.2, labels[i]);
    }
    c.hline();
    c.save(path);
}

void line_chart(const std::string& path, const Axes& axes, const std::vector<Series>& series) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) return;
    if (axes.hline) ymax = std::max(ymax, *axes.hline);
    Canvas c(axes, xmin, xmax, ymin, ymax);
    c.x_ticks();
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        c.raw() << "<polyline fill=\"none\" stroke=\"" << kPalette[k % 8] << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) c.raw() << c.px(s.x[i]) << ',' << c.py(s.y[i]) << ' ';
        c.raw() << "\"/>\n";
        c.raw() << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 * (k + 1) << "\" fill=\"" << kPalette[k % 8]
                << "\">" << esc(s.name) << "</text>\n";
    }
    c.hline();
    c.save(path);
}

void box_chart(const std::string& path, const Axes& axes, const std::vector<std::string>& labels,
               const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) return;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& s : samples)
        for (double v : s) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    Axes a = axes;
    Canvas c(a, 0.0, double(samples.size()), ymin, ymax);
    double slot = (W - L - R) / samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].empty()) continue;
        std::vector<double> s = samples[i];
        auto q = percentiles_inplace(s, {0.0, 0.25, 0.5, 0.75, 1.0});
        double xc = L + slot * (i + 0.5), hw = slot * 0.3;
        const char* col = kPalette[i % 8];
        c.raw() << "<line x1=\"" << xc << "\" y1=\"" << c.py(q[0]) << "\" x2=\"" << xc << "\" y2=\"" << c.py(q[4])
                << "\" stroke=\"" << col << "\"/>\n";
        c.raw() << "<rect x=\"" << xc - hw << "\" y=\"" << c.py(q[3]) << "\" width=\"" << 2 * hw << "\" height=\""
                << c.py(q[1]) - c.py(q[3]) << "\" fill=\"" << col << "\" fill-opacity=\"0.4\" stroke=\"" << col
                << "\"/>\n";
        c.raw() << "<line x1=\"" << xc - hw << "\" y1=\"" << c.py(q[2]) << "\" x2=\"" << xc + hw << "\" y2=\""
                << c.py(q[2]) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        category_label(c.raw(), xc - hw, labels[i]);
    }
    c.hline();
    c.save(path);
}

}  // namespace pqcsim::svg
