use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use log::info;
use polar_detect::decoders::fastssc_build_tree;
use polar_detect::detection::Method;
use polar_detect::sim::{
    calibrate_operating_point, format_float, run_bler, run_mdr, write_bler_csv, write_mdr_csv, CalibrationConfig,
    DecoderSpec, DetectorSpec, MdrTable, StopRule, TrialConfig,
};
use polar_detect::PolarCode;

use super::range::{parse_f64_sweep, parse_usize_sweep};
use super::{BlerArgs, CalibrateArgs, Cli, Command, CommonArgs, Failure, FileConfig, MdrArgs};

type Header = Vec<(String, String)>;

const DEFAULT_EBN0_SWEEP: &str = "1.0:6.0:0.25";
const DEFAULT_TARGET: f64 = 1e-2;
const DEFAULT_LO_DB: f64 = 2.0;
const DEFAULT_HI_DB: f64 = 7.0;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

struct Common {
    code: PolarCode,
    design_param: f64,
    seed: u64,
    out: PathBuf,
    stop: StopRule,
}

impl Common {
    fn resolve(args: &CommonArgs, file: &FileConfig) -> anyhow::Result<Self> {
        let len = args.len.or(file.len).unwrap_or(256);
        let k = args.info_bits.or(file.info_bits).unwrap_or(24);
        let crc = args.crc_len.or(file.crc_len).unwrap_or(16);
        let design_param = args.design_param.or(file.design_param).unwrap_or(0.5);
        let code = PolarCode::build(len, k, crc, design_param)?;
        let defaults = StopRule::default();
        let stop = StopRule {
            min_blocks: args.min_blocks.or(file.min_blocks).unwrap_or(defaults.min_blocks),
            min_errors: args.min_errors.or(file.min_errors).unwrap_or(defaults.min_errors),
            max_blocks: args.max_blocks.or(file.max_blocks).unwrap_or(defaults.max_blocks),
        };
        if stop.max_blocks == 0 {
            bail!("max-blocks must be positive");
        }
        Ok(Self {
            code,
            design_param,
            seed: args.seed.or(file.seed).unwrap_or(1),
            out: args.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("results")),
            stop,
        })
    }

    fn header(&self, command: &str) -> Header {
        let mut h = vec![
            ("tool".to_string(), format!("polar-detect {}", env!("CARGO_PKG_VERSION"))),
            ("command".to_string(), command.to_string()),
            ("N".to_string(), self.code.len().to_string()),
            ("K".to_string(), self.code.k().to_string()),
            ("C".to_string(), self.code.crc_len().to_string()),
            ("design_param".to_string(), format_float(self.design_param)),
            ("seed".to_string(), self.seed.to_string()),
        ];
        h.push(("rng".to_string(), "chacha8+splitmix64".to_string()));
        h
    }

    fn stop_header(&self, h: &mut Header) {
        h.push(("min_blocks".into(), self.stop.min_blocks.to_string()));
        h.push(("min_errors".into(), self.stop.min_errors.to_string()));
        h.push(("max_blocks".into(), self.stop.max_blocks.to_string()));
    }

    fn output_path(&self, name: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))
            .map_err(runtime)?;
        Ok(self.out.join(name))
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path).map_err(usage)?,
        None => FileConfig::default(),
    };
    let common = Common::resolve(&cli.common, &file).map_err(usage)?;
    if let Some(threads) = cli.common.threads.or(file.threads) {
        if threads == 0 {
            return Err(usage(anyhow!("--threads must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(runtime)?;
    }
    match &cli.command {
        Command::Bler(args) => cmd_bler(&common, args, &file),
        Command::Mdr(args) => cmd_mdr(&common, args, &file),
        Command::Calibrate(args) => cmd_calibrate(&common, args, &file),
        Command::CodeInfo => cmd_code_info(&common),
    }
}

fn parse_decoder(name: &str) -> Result<DecoderSpec, Failure> {
    name.parse::<DecoderSpec>().map_err(usage)
}

fn cmd_bler(common: &Common, args: &BlerArgs, file: &FileConfig) -> Result<(), Failure> {
    let names: Vec<String> = if !args.decoder.is_empty() {
        args.decoder.clone()
    } else if let Some(d) = &file.bler.decoders {
        d.clone()
    } else {
        DecoderSpec::reference_set().iter().map(|d| d.to_string()).collect()
    };
    let decoders = names.iter().map(|n| parse_decoder(n)).collect::<Result<Vec<_>, _>>()?;
    if decoders.is_empty() {
        return Err(usage(anyhow!("no decoder selected")));
    }
    let noiseless = args.noiseless || file.bler.noiseless.unwrap_or(false);
    let sweep = match (&args.ebn0, &file.bler.ebn0) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => s.to_string(),
        (None, None) => DEFAULT_EBN0_SWEEP.to_string(),
    };
    let points: Vec<Option<f64>> = if noiseless {
        vec![None]
    } else {
        parse_f64_sweep(&sweep).map_err(usage)?.into_iter().map(Some).collect()
    };
    for d in &decoders {
        let mut header = common.header("bler");
        header.push(("decoder".into(), d.to_string()));
        header.push(("channel".into(), if noiseless { "noiseless".into() } else { "awgn-bpsk".into() }));
        if !noiseless {
            header.push(("ebn0_db".into(), sweep.clone()));
        }
        common.stop_header(&mut header);
        let curve = run_bler(&common.code, *d, &points, common.stop, common.seed).map_err(|e| match e {
            polar_detect::Error::Channel(_) | polar_detect::Error::Config(_) => usage(e),
            e => runtime(e),
        })?;
        let path = common.output_path(&format!("bler_{d}.csv"))?;
        write_bler_csv(&path, &header, &curve).map_err(runtime)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_mdr(common: &Common, args: &MdrArgs, file: &FileConfig) -> Result<(), Failure> {
    let mf = &file.mdr;
    let method: Method = args
        .method
        .as_deref()
        .or(mf.method.as_deref())
        .ok_or_else(|| usage(anyhow!("--method is required (ls, fs, re or fastssc)")))?
        .parse()
        .map_err(usage)?;
    let tree = fastssc_build_tree(&common.code);
    let include_spc = if args.include_spc {
        true
    } else if args.no_spc {
        false
    } else {
        mf.include_spc.unwrap_or(false)
    };
    let efforts = if method == Method::FastSsc {
        if args.iters.is_some() {
            return Err(usage(anyhow!("fastssc takes its effort from --t, not --iters")));
        }
        let text = match (&args.t, &mf.t) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s.to_string(),
            (None, None) => format!("1:{}", tree.contributing_leaves(include_spc).max(1)),
        };
        parse_usize_sweep(&text).map_err(usage)?
    } else {
        if args.t.is_some() {
            return Err(usage(anyhow!("{method} takes its effort from --iters, not --t")));
        }
        let text = match (&args.iters, &mf.iters) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s.to_string(),
            (None, None) => format!("{}:15", method.min_effort()),
        };
        parse_usize_sweep(&text).map_err(usage)?
    };
    let blocks = args.blocks.or(mf.blocks).unwrap_or(44);
    let b_values = match (&args.b, &mf.b) {
        (Some(s), _) => parse_usize_sweep(s).map_err(usage)?,
        (None, Some(s)) => parse_usize_sweep(&s.to_string()).map_err(usage)?,
        (None, None) => (1..=blocks).collect(),
    };
    let mut cfg = TrialConfig {
        blocks,
        detectors: vec![DetectorSpec::new(method, efforts).with_spc(include_spc)],
        b_values,
        trials: args.trials.or(mf.trials).unwrap_or(10_000),
        root_seed: common.seed,
        oracle_list: args.oracle_list.or(mf.oracle_list).unwrap_or(2),
        second_stage_list: args.second_stage.or(mf.second_stage),
        ..TrialConfig::default()
    };
    if cfg.oracle_list == 0 || cfg.second_stage_list == Some(0) {
        return Err(usage(anyhow!("list sizes must be at least 1")));
    }
    // Validate everything except the operating point before a long calibration.
    cfg.validate(&common.code).map_err(usage)?;

    let mut header = common.header("mdr");
    let (ebn0, source) = match args.ebn0.or(mf.ebn0) {
        Some(db) => (db, "given".to_string()),
        None => {
            let target = args.target.or(mf.target).unwrap_or(DEFAULT_TARGET);
            let spec = DecoderSpec::Scl { list: 2, crc: true };
            info!("no --ebn0 given; calibrating {spec} to BLER {target}");
            let cal = calibrate(common, spec, target, DEFAULT_LO_DB, DEFAULT_HI_DB)?;
            common.stop_header(&mut header);
            (cal.ebn0_db, format!("calibrated {} to BLER {}", spec.to_string(), format_float(target)))
        }
    };
    cfg.ebn0_db = ebn0;
    cfg.validate(&common.code).map_err(usage)?;

    let series = cfg.series();
    let label = series[0].label();
    header.push(("method".into(), label.to_string()));
    header.push(("ebn0_db".into(), format_float(ebn0)));
    header.push(("ebn0_source".into(), source));
    header.push(("M".into(), cfg.blocks.to_string()));
    header.push(("efforts".into(), join(series.iter().map(|s| s.effort))));
    header.push(("B".into(), join(cfg.b_values.iter().copied())));
    header.push(("trials".into(), cfg.trials.to_string()));
    header.push(("oracle".into(), format!("scl{}", cfg.oracle_list)));

    let table = run_mdr(&cfg, &common.code).map_err(runtime)?;
    header.push(("decodable_trials".into(), table.decodable.to_string()));
    let path = common.output_path(&format!("mdr_{label}.csv"))?;
    write_mdr_csv(&path, &header, &table).map_err(runtime)?;
    println!("{}", path.display());
    if let Some(list) = cfg.second_stage_list {
        let mut h = header.clone();
        h.push(("second_stage".into(), format!("scl{list}")));
        let path = common.output_path(&format!("mdr_{label}_second_stage.csv"))?;
        write_second_stage(&path, &h, &table).map_err(runtime)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn join(values: impl Iterator<Item = usize>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn write_second_stage(path: &Path, header: &Header, table: &MdrTable) -> anyhow::Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    for (k, v) in header {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "method,effort,B,success,false_alarms,trials")?;
    for r in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.series.label(),
            r.series.effort,
            r.b,
            r.second_stage_success.unwrap_or(0),
            r.second_stage_false_alarms.unwrap_or(0),
            r.trials
        )?;
    }
    w.flush()?;
    Ok(())
}

fn calibrate(
    common: &Common,
    spec: DecoderSpec,
    target: f64,
    lo_db: f64,
    hi_db: f64,
) -> Result<polar_detect::sim::Calibration, Failure> {
    if !(target > 0.0 && target < 1.0) {
        return Err(usage(anyhow!("target BLER must lie in (0, 1), got {target}")));
    }
    if !(lo_db < hi_db) {
        return Err(usage(anyhow!("search range needs lo < hi")));
    }
    let cfg = CalibrationConfig {
        lo_db,
        hi_db,
        stop: common.stop,
        root_seed: common.seed,
        ..CalibrationConfig::default()
    };
    calibrate_operating_point(&common.code, spec, target, &cfg).map_err(runtime)
}

fn cmd_calibrate(common: &Common, args: &CalibrateArgs, file: &FileConfig) -> Result<(), Failure> {
    let cf = &file.calibrate;
    let spec = parse_decoder(args.decoder.as_deref().or(cf.decoder.as_deref()).unwrap_or("scl2"))?;
    let target = args.target.or(cf.target).unwrap_or(DEFAULT_TARGET);
    let lo = args.lo.or(cf.lo).unwrap_or(DEFAULT_LO_DB);
    let hi = args.hi.or(cf.hi).unwrap_or(DEFAULT_HI_DB);
    let cal = calibrate(common, spec, target, lo, hi)?;
    let (ci_lo, ci_hi) = cal.point.wilson95();
    println!("decoder={}", spec.to_string());
    println!("target_bler={}", format_float(target));
    println!("ebn0_db={:.4}", cal.ebn0_db);
    println!("bler={:.4e}", cal.point.y);
    println!("errors={}", cal.point.count);
    println!("blocks={}", cal.point.n);
    println!("ci95=[{ci_lo:.4e}, {ci_hi:.4e}]");
    println!("evaluations={}", cal.evaluations.len());
    Ok(())
}

fn cmd_code_info(common: &Common) -> Result<(), Failure> {
    let code = &common.code;
    let tree = fastssc_build_tree(code);
    let mut s = String::new();
    s.push_str(&format!("N={}\nK={}\nC={}\n", code.len(), code.k(), code.crc_len()));
    s.push_str(&format!("design_param={}\n", format_float(common.design_param)));
    s.push_str(&format!("info_set ({}):\n", code.info_set().len()));
    for i in code.info_set() {
        s.push_str(&format!("{i}\n"));
    }
    s.push_str(&format!("frozen_set ({}):\n", code.frozen_set().len()));
    for i in code.frozen_set() {
        s.push_str(&format!("{i}\n"));
    }
    let leaves = tree.leaves();
    s.push_str(&format!("leaves ({}): start size kind\n", leaves.len()));
    for leaf in &leaves {
        s.push_str(&format!("{} {} {}\n", leaf.start, leaf.size, leaf.kind));
    }
    s.push_str(&format!("contributing_leaves_without_spc={}\n", tree.contributing_leaves(false)));
    s.push_str(&format!("contributing_leaves_with_spc={}\n", tree.contributing_leaves(true)));
    print!("{s}");
    Ok(())
}
