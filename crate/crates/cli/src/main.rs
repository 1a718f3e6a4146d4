mod args;
mod config;

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use treeprofiles::classifier::{encode_model, ForestParams};
use treeprofiles::experiment::{classify_stack, compare, mode_name, CompareConfig, PreparedInput};
use treeprofiles::imagery::{load_grayscale, load_labels, load_multiband, write_labels, write_pgm, PgmEncoding};
use treeprofiles::profiles::{read_profile_stack, write_profile_stack, FilterSpec, ProfileRequest, TreeFamily};
use treeprofiles::synthetic::{synthetic_scene, SceneParams};
use treeprofiles::{
    build_alpha_tree, build_max_tree, build_min_tree, build_omega_tree, build_tree_of_shapes,
    compute_attributes, Attribute, Error, LabelMap, Result, TreeKind,
};

use args::{Cli, ClassifyArgs, Command, CompareArgs, InputArgs, LabelArgs, ProfileArgs, ProfileOptions, SynthArgs, TreeDumpArgs};

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Profile(a) => profile(a),
        Command::Classify(a) => classify(a),
        Command::Compare(a) => run_compare(a),
        Command::TreeDump(a) => tree_dump(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("treeprof: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn load_input(a: &InputArgs) -> Result<PreparedInput> {
    match (&a.input.image, &a.input.multiband) {
        (Some(path), _) => Ok(PreparedInput::gray(load_grayscale(path)?)),
        (None, Some(path)) => PreparedInput::multiband(&load_multiband(path)?, a.pca, a.levels),
        (None, None) => Err(Error::InvalidArgument("no input image".into())),
    }
}

fn load_label_pair(a: &LabelArgs, dims: (usize, usize)) -> Result<(LabelMap, LabelMap)> {
    Ok((load_labels(&a.train, dims)?, load_labels(&a.test, dims)?))
}

fn spec(attribute: Attribute, given: &[f64], pixel_count: usize) -> Result<FilterSpec> {
    if given.is_empty() {
        Ok(FilterSpec::default_for(attribute, pixel_count))
    } else {
        FilterSpec::with_default_rule(attribute, given.to_vec())
    }
}

fn requests(o: &ProfileOptions, pixel_count: usize) -> Result<Vec<ProfileRequest>> {
    let mut specs = Vec::new();
    for &a in &o.attr {
        let attribute = Attribute::from(a);
        let given = match attribute {
            Attribute::Area => &o.area_thresholds,
            Attribute::MomentOfInertia => &o.moment_thresholds,
        };
        specs.push(spec(attribute, given, pixel_count)?);
    }
    let features = o.feature.iter().map(|&f| f.into()).collect::<Vec<_>>();
    let mut out = Vec::new();
    for &t in &o.tree {
        for mode in o.mode.modes() {
            out.push(
                ProfileRequest::new(TreeFamily::from(t), mode, specs.clone())
                    .with_features(features.clone())
                    .with_connectivity(o.connectivity.into()),
            );
        }
    }
    Ok(out)
}

fn method_name(r: &ProfileRequest) -> String {
    format!("{}-{}", r.family.short_name(), mode_name(r.mode))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn profile(a: ProfileArgs) -> Result<()> {
    let input = load_input(&a.input)?;
    create_dir(&a.out)?;
    for request in requests(&a.profile, input.pixel_count())? {
        let stack = input.profile(&request)?;
        let path = a.out.join(format!("{}.json", method_name(&request)));
        write_profile_stack(&path, &stack)?;
        println!("{} dim={}", path.display(), stack.dim());
    }
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let started = Instant::now();
    let input = load_input(&a.input)?;
    let (train, test) = load_label_pair(&a.labels, input.dims())?;
    let params = ForestParams {
        n_trees: a.forest.rf_trees,
        seed: a.forest.seed,
    };
    let mut stacks = Vec::new();
    if a.raw {
        stacks.push(("raw".to_string(), input.raw_stack()?));
    }
    match &a.profile_stack {
        Some(path) => {
            let stack = read_profile_stack(path)?;
            if (stack.width(), stack.height()) != input.dims() {
                return Err(Error::DimensionMismatch {
                    expected: input.dims(),
                    found: (stack.width(), stack.height()),
                });
            }
            stacks.push(("stored".to_string(), stack));
        }
        None => {
            for request in requests(&a.profile, input.pixel_count())? {
                stacks.push((method_name(&request), input.profile(&request)?));
            }
        }
    }

    create_dir(&a.out)?;
    let mut reports = Vec::new();
    for (name, stack) in &stacks {
        let result = classify_stack(stack, &train, &test, params, name)?;
        print!("{}", result.report.to_text());
        write_labels(a.out.join(format!("{name}-prediction.pgm")), &result.prediction)?;
        write_file(&a.out.join(format!("{name}.tprf")), encode_model(&result.model))?;
        reports.push(result.report);
    }
    let json = serde_json::to_string_pretty(&reports).map_err(|e| Error::Internal(e.to_string()))?;
    write_file(&a.out.join("report.json"), json + "\n")?;
    println!("runtime {:.2}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn run_compare(a: CompareArgs) -> Result<()> {
    let started = Instant::now();
    let input = load_input(&a.input)?;
    let (train, test) = load_label_pair(&a.labels, input.dims())?;
    let n = input.pixel_count();
    let config = CompareConfig {
        families: a.tree.iter().map(|&t| t.into()).collect(),
        modes: a.mode.modes(),
        area: spec(Attribute::Area, &a.area_thresholds, n)?,
        moment: spec(Attribute::MomentOfInertia, &a.moment_thresholds, n)?,
        features: a.feature.iter().map(|&f| f.into()).collect(),
        connectivity: a.connectivity.into(),
        forest: ForestParams {
            n_trees: a.forest.rf_trees,
            seed: a.forest.seed,
        },
    };
    let table = compare(&input, &train, &test, &config)?;
    create_dir(&a.out)?;
    write_file(&a.out.join("compare.csv"), table.to_csv())?;
    write_file(&a.out.join("compare.json"), table.to_json())?;
    print!("{}", table.to_text());
    println!("runtime {:.2}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn tree_dump(a: TreeDumpArgs) -> Result<()> {
    let image = load_grayscale(&a.image)?;
    let conn = a.connectivity.into();
    let tree = match TreeKind::from(a.tree) {
        TreeKind::MaxTree => build_max_tree(&image, conn),
        TreeKind::MinTree => build_min_tree(&image, conn),
        TreeKind::TreeOfShapes => build_tree_of_shapes(&image),
        TreeKind::AlphaTree => build_alpha_tree(&image, conn),
        TreeKind::OmegaTree => build_omega_tree(&build_alpha_tree(&image, conn), &image)?,
    };
    let mut out = format!("# {} nodes\n", tree.node_count());
    if a.attributes {
        let table = compute_attributes(&tree, &image)?;
        out.push_str("# id parent level area | id area inertia stddev\n");
        for (t, r) in tree.dump().lines().zip(table.dump().lines()) {
            out.push_str(t);
            out.push_str(" | ");
            out.push_str(r);
            out.push('\n');
        }
    } else {
        out.push_str("# id parent level area\n");
        out.push_str(&tree.dump());
    }
    emit(&out)
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let scene = synthetic_scene(&SceneParams {
        width: a.width,
        height: a.height,
        seed: a.seed,
        ..SceneParams::default()
    })?;
    create_dir(&a.out)?;
    write_pgm(a.out.join("image.pgm"), &scene.image, PgmEncoding::Binary)?;
    write_labels(a.out.join("train.pgm"), &scene.train)?;
    write_labels(a.out.join("test.pgm"), &scene.test)?;
    write_labels(a.out.join("truth.pgm"), &scene.truth)?;
    println!(
        "{}x{} scene, {} train and {} test pixels in {}",
        a.width,
        a.height,
        scene.train.labeled_count(),
        scene.test.labeled_count(),
        a.out.display()
    );
    Ok(())
}

