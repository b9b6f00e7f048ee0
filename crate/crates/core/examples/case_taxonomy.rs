//! The relevance cases and how the weighted error ranks them.
//!
//! ```bash
//! cargo run -p relevance-score --example case_taxonomy
//! ```

use relevance_score::metric::{evaluate_probabilities, DEFAULT_TOLERANCE};
use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let (p, a) = (OutcomeLabel::new("predicted")?, OutcomeLabel::new("actual")?);
    // (P(mode), P(predicted), P(actual))
    let configurations = [
        ("mode predicted, rarer outcome happened", (0.5, 0.5, 0.2)),
        ("prediction between mode and actual", (0.5, 0.3, 0.1)),
        ("actual between mode and prediction", (0.5, 0.1, 0.3)),
        ("mode happened, something else predicted", (0.5, 0.1, 0.5)),
        ("equally likely mismatch", (0.4, 0.3, 0.3)),
    ];
    let weights = [(2.0, 1.0), (1.0, 1.0), (1.0, 2.0)];

    print!("{:<42}{:<11}", "configuration", "case");
    for (alpha, beta) in weights {
        print!("{:>10}", format!("({alpha},{beta})"));
    }
    println!();
    for (name, (h, pp, pa)) in configurations {
        let probs = ProbabilityTriple::new(h, pp, pa)?;
        print!("{name:<42}{:<11}", classify_case(&p, &a, &probs, DEFAULT_TOLERANCE).to_string());
        for (alpha, beta) in weights {
            let e = evaluate_probabilities(&p, &a, probs, &RsParams::new(alpha, beta)?);
            print!("{:>10.2}", e.score);
        }
        println!();
    }
    Ok(())
}
