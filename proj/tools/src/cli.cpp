#include "mvd_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "mvd/denoise.hpp"
#include "mvd/errors.hpp"
#include "mvd/mvi_io.hpp"
#include "mvd/nlmeans.hpp"
#include "mvd/noise.hpp"
#include "mvd/render.hpp"
#include "mvd/synthetic.hpp"

namespace mvd::cli {

std::string format_mse(double eps) {
  if (eps == 0.0) return "0.000000";
  const int decimals = std::max(0, 5 - static_cast<int>(std::floor(std::log10(std::abs(eps)))));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, eps);
  return buf;
}

namespace {

struct GenerateArgs {
  std::string name;
  std::vector<int> dims{64, 64};
  std::uint64_t seed = 0;
  std::string out;
};

struct NoiseArgs {
  std::string in, out, model = "tangent";
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct DenoiseArgs {
  std::string in, out, oracle_out;
  double sigma = 0.0;
  std::optional<int> s1, s2, w1, w2, k1, k2, threads;
  std::optional<double> gamma;
  bool no_accel = false;
};

struct NlMeansArgs {
  std::string in, out;
  double sigma = 0.0;
  int s = 5, w = 21, k = 50;
  double delta = 2.0;
  std::optional<double> tau;
  int threads = 1;
};

struct MseArgs {
  std::string a, b;
};

struct RenderArgs {
  std::string in, out, style = "auto";
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlocal MMSE denoising of manifold-valued images", "mvdenoise"};
  app.require_subcommand(1, 1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a synthetic test image");
  gen->add_option("name", ga.name, "Generator name")->required()->check(CLI::IsMember(generator_names()));
  gen->add_option("--dims", ga.dims, "Rows and columns")->expected(2);
  gen->add_option("--seed", ga.seed, "Random seed");
  gen->add_option("-o,--output", ga.out, "Output .mvi")->required();

  NoiseArgs na;
  auto* noise = app.add_subcommand("noise", "Add intrinsic Gaussian noise");
  noise->add_option("-i,--input", na.in, "Clean .mvi")->required();
  noise->add_option("--model", na.model, "tangent or said")->check(CLI::IsMember({"tangent", "said"}));
  noise->add_option("--sigma", na.sigma, "Noise standard deviation")->required();
  noise->add_option("--seed", na.seed, "Random seed");
  noise->add_option("-o,--output", na.out, "Output .mvi")->required();

  DenoiseArgs da;
  auto* den = app.add_subcommand("denoise", "Two-step nonlocal MMSE denoising");
  den->add_option("-i,--input", da.in, "Noisy .mvi")->required();
  den->add_option("--sigma", da.sigma, "Noise standard deviation")->required();
  den->add_option("--s1", da.s1, "Patch side, step 1");
  den->add_option("--s2", da.s2, "Patch side, step 2");
  den->add_option("--w1", da.w1, "Search window side, step 1");
  den->add_option("--w2", da.w2, "Search window side, step 2");
  den->add_option("--k1", da.k1, "Similar patches, step 1");
  den->add_option("--k2", da.k2, "Similar patches, step 2");
  den->add_option("--gamma", da.gamma, "Homogeneous area threshold factor");
  den->add_flag("--no-accel", da.no_accel, "Use every patch as a reference");
  den->add_option("--threads", da.threads, "Worker threads (0 = all cores)");
  den->add_option("--oracle-out", da.oracle_out, "Also write the step 1 image");
  den->add_option("-o,--output", da.out, "Output .mvi")->required();

  NlMeansArgs la;
  auto* nlm = app.add_subcommand("nlmeans", "Nonlocal means baseline");
  nlm->add_option("-i,--input", la.in, "Noisy .mvi")->required();
  nlm->add_option("--sigma", la.sigma, "Noise standard deviation (sets the default tau)")->required();
  nlm->add_option("--s", la.s, "Patch side");
  nlm->add_option("--w", la.w, "Search window side");
  nlm->add_option("--k", la.k, "Similar patches");
  nlm->add_option("--delta", la.delta, "Spatial weight spread");
  nlm->add_option("--tau", la.tau, "Similarity weight scale");
  nlm->add_option("--threads", la.threads, "Worker threads (0 = all cores)");
  nlm->add_option("-o,--output", la.out, "Output .mvi")->required();

  MseArgs ma;
  auto* mse_cmd = app.add_subcommand("mse", "Mean squared geodesic error between two images");
  mse_cmd->add_option("-a", ma.a, "First .mvi")->required();
  mse_cmd->add_option("-b", ma.b, "Second .mvi")->required();

  RenderArgs ra;
  auto* ren = app.add_subcommand("render", "Render an image to SVG or PPM");
  ren->add_option("-i,--input", ra.in, "Input .mvi")->required();
  ren->add_option("--style", ra.style, "auto, svg or ppm")->check(CLI::IsMember({"auto", "svg", "ppm"}));
  ren->add_option("-o,--output", ra.out, "Output file")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    if (gen->parsed()) {
      write_mvi(generate(ga.name, ga.dims[0], ga.dims[1], ga.seed), ga.out);
    } else if (noise->parsed()) {
      const ManifoldImage img = read_mvi(na.in);
      NoiseSpec spec;
      spec.model = na.model == "said" ? NoiseModel::SaidSpd : NoiseModel::TangentGaussian;
      spec.sigma = na.sigma;
      write_mvi(add_noise(img, spec, na.seed), na.out);
    } else if (den->parsed()) {
      const ManifoldImage img = read_mvi(da.in);
      DenoiseParams p = DenoiseParams::defaults_for(img.manifold(), da.sigma).fitted_to(img.rows(), img.cols());
      if (da.s1) p.s1 = *da.s1;
      if (da.s2) p.s2 = *da.s2;
      if (da.w1) p.w1 = *da.w1;
      if (da.w2) p.w2 = *da.w2;
      if (da.k1) p.k1 = *da.k1;
      if (da.k2) p.k2 = *da.k2;
      if (da.gamma) p.gamma = *da.gamma;
      if (da.threads) p.threads = *da.threads;
      p.accelerate = !da.no_accel;
      const NlmmseResult r = nlmmse(img, p);
      if (!da.oracle_out.empty()) write_mvi(r.oracle, da.oracle_out);
      write_mvi(r.final, da.out);
    } else if (nlm->parsed()) {
      const ManifoldImage img = read_mvi(la.in);
      NlMeansParams p;
      p.s = la.s;
      p.w = la.w;
      p.k = la.k;
      p.delta = la.delta;
      p.threads = la.threads;
      if (la.tau) {
        p.tau = *la.tau;
      } else {
        // Pure-noise patch pairs sit near d^2 = 2 sigma^2 d sum(g).
        const int h = (la.s - 1) / 2;
        double g = 0.0;
        for (int a = -h; a <= h; ++a)
          for (int b = -h; b <= h; ++b) g += std::exp(-(a * a + b * b) / (2.0 * la.delta * la.delta));
        p.tau = std::max(la.sigma, 1e-12) * std::sqrt(g * img.manifold().dim());
      }
      write_mvi(nlmeans(img, p), la.out);
    } else if (mse_cmd->parsed()) {
      out << format_mse(mse(read_mvi(ma.a), read_mvi(ma.b))) << "\n";
    } else if (ren->parsed()) {
      render(read_mvi(ra.in), parse_render_style(ra.style), ra.out);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << " (byte offset " << e.offset() << ")\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace mvd::cli
