use std::io::{self, BufReader};
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;

use hospcourse::corpus::load_corpus;
use hospcourse::scorer::wire::serve;

use crate::error::CliError;
use crate::summarize::train_builtin;
use crate::ServeArgs;

pub fn run(args: ServeArgs) -> Result<(), CliError> {
    let records = load_corpus(&args.corpus)
        .map_err(|e| CliError::corpus(format!("{}: {e}", args.corpus.display())))?;
    let scorer = Arc::new(train_builtin(&records, &args.ngram)?);
    match args.listen {
        None => {
            let stdin = io::stdin();
            let stdout = io::stdout();
            serve(scorer.as_ref(), stdin.lock(), stdout.lock()).map_err(|e| CliError::io("stdio", e))
        }
        Some(addr) => {
            let listener = TcpListener::bind(&addr).map_err(|e| CliError::io(&addr, e))?;
            let local = listener.local_addr().map_err(|e| CliError::io(&addr, e))?;
            eprintln!("listening on tcp://{local}");
            for stream in listener.incoming() {
                let stream = match stream {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("accept failed: {e}");
                        continue;
                    }
                };
                let scorer = Arc::clone(&scorer);
                thread::spawn(move || {
                    let Ok(reader) = stream.try_clone() else { return };
                    let _ = serve(scorer.as_ref(), BufReader::new(reader), stream);
                });
            }
            Ok(())
        }
    }
}
