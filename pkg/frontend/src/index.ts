/**
 * Bridge to the compasskit pose assessment toolkit for JS/TS pipelines.
 *
 * Every entry point delegates to the compasskit CLI over a child process
 * with JSON in/out, so bridge outputs are byte-identical to the CLI's and
 * no scoring logic is duplicated on this side of the boundary. All calls
 * are independent processes: reentrant and safe to run concurrently.
 */

import { execFile } from 'node:child_process';

const CLI = process.env.COMPASSKIT_BIN ?? 'compasskit';

export interface PcbTriple {
    bindingAffinity: number;
    strainEnergy: number;
    clashCount: number;
}

export interface BridgeError {
    code: number;
    message: string;
}

export type AssessResult =
    | { ok: true; reportJson: string }
    | { ok: false; error: BridgeError };

export interface AssessConfig {
    weightsPath?: string;
    pocketCutoff?: number;
    hisCation?: boolean;
}

interface RunResult {
    code: number;
    stdout: string;
    stderr: string;
}

function run(args: string[]): Promise<RunResult> {
    return new Promise((resolve) => {
        execFile(CLI, args, { maxBuffer: 64 * 1024 * 1024 }, (error, stdout, stderr) => {
            let code = 0;
            if (error) {
                code = typeof error.code === 'number' ? error.code : 127;
            }
            resolve({ code, stdout, stderr });
        });
    });
}

function tripleToList(t: PcbTriple): string {
    return `${t.bindingAffinity},${t.strainEnergy},${t.clashCount}`;
}

function finiteTriple(t: PcbTriple): boolean {
    return (
        Number.isFinite(t.bindingAffinity) &&
        Number.isFinite(t.strainEnergy) &&
        Number.isFinite(t.clashCount)
    );
}

/**
 * Assess one protein-ligand pair. Resolves to the raw report JSON exactly
 * as the CLI prints it (byte-identical), or a structured error payload;
 * never rejects for toolkit-level failures.
 */
export async function assess(
    proteinPath: string,
    ligandPath: string,
    config: AssessConfig = {},
): Promise<AssessResult> {
    const args = ['assess', '--protein', proteinPath, '--ligand', ligandPath, '--format', 'json'];
    if (config.weightsPath) args.push('--weights', config.weightsPath);
    if (config.pocketCutoff !== undefined) args.push(`--pocket-cutoff=${config.pocketCutoff}`);
    if (config.hisCation) args.push('--his-cation');
    const result = await run(args);
    if (result.code !== 0) {
        return { ok: false, error: { code: result.code, message: result.stderr.trim() } };
    }
    return { ok: true, reportJson: result.stdout };
}

export interface ScoreBreakdown {
    components: { affinity: number; strain: number; clash: number };
    total: number;
    predFavorable: boolean;
    truthFavorable: boolean;
}

/**
 * Full Compass Score breakdown for a predicted vs ground-truth PCB triple.
 */
export async function score(pred: PcbTriple, truth: PcbTriple): Promise<ScoreBreakdown> {
    if (!finiteTriple(pred) || !finiteTriple(truth)) {
        throw new Error('score: triples must be finite');
    }
    const result = await run([
        'score',
        `--pred=${tripleToList(pred)}`,
        `--truth=${tripleToList(truth)}`,
        '--feature',
        'total',
        '--format',
        'json',
    ]);
    if (result.code !== 0) {
        throw new Error(`score failed (exit ${result.code}): ${result.stderr.trim()}`);
    }
    const payload = JSON.parse(result.stdout);
    return {
        components: payload.components,
        total: payload.total,
        predFavorable: payload.pred_favorable,
        truthFavorable: payload.truth_favorable,
    };
}

/** Total Compass Score (equal-weight mean of the per-feature values). */
export async function compassTotal(pred: PcbTriple, truth: PcbTriple): Promise<number> {
    return (await score(pred, truth)).total;
}

/** LAN-MSE over paired value sequences. */
export async function lanMse(pred: number[], truth: number[]): Promise<number> {
    if (pred.length === 0 || pred.length !== truth.length) {
        throw new Error('lanMse: sequences must be equal-length and non-empty');
    }
    if (![...pred, ...truth].every(Number.isFinite)) {
        throw new Error('lanMse: values must be finite');
    }
    const result = await run([
        'score',
        `--pred=${pred.join(',')}`,
        `--truth=${truth.join(',')}`,
        '--feature',
        'affinity',
        '--format',
        'json',
    ]);
    if (result.code !== 0) {
        throw new Error(`lanMse failed (exit ${result.code}): ${result.stderr.trim()}`);
    }
    return JSON.parse(result.stdout).lan_mse;
}

/** Favorability verdict for one PCB triple. */
export async function classifyFavorability(
    triple: PcbTriple,
): Promise<'favorable' | 'unfavorable'> {
    const breakdown = await score(triple, triple);
    return breakdown.truthFavorable ? 'favorable' : 'unfavorable';
}

/** Toolkit version string. */
export async function version(): Promise<string> {
    const result = await run(['--version']);
    if (result.code !== 0) {
        throw new Error(`version failed (exit ${result.code})`);
    }
    return result.stdout.trim();
}
