import type { Distribution, StanceLabel } from '../types.js';

const LABELS: StanceLabel[] = ['AGAINST', 'FAVOR', 'NONE'];

// The balance widget is render-only: every number comes verbatim from the
// last API response (distribution projection + 1-hop propagation preview).
export class BalanceWidget {
    private readonly root: HTMLElement;

    constructor(container: HTMLElement) {
        this.root = document.createElement('div');
        this.root.className = 'balance-widget';
        this.root.innerHTML = `
          <h2>Projected balance</h2>
          <table>
            <thead><tr><th></th>${LABELS.map((l) => `<th>${l}</th>`).join('')}<th>total</th></tr></thead>
            <tbody>
              <tr data-row="distribution"><td>on-topic tweets</td>
                ${LABELS.map((l) => `<td data-dist="${l}">0</td>`).join('')}<td data-dist-total>0</td></tr>
              <tr data-row="preview"><td>1-hop accounts</td>
                ${LABELS.map((l) => `<td data-preview="${l}">–</td>`).join('')}<td>–</td></tr>
            </tbody>
          </table>`;
        container.appendChild(this.root);
    }

    setDistribution(dist: Distribution): void {
        for (const label of LABELS) {
            this.cell(`[data-dist="${label}"]`).textContent = String(dist.counts[label] ?? 0);
        }
        this.cell('[data-dist-total]').textContent = String(dist.total);
    }

    setPropagationPreview(preview: Record<StanceLabel, number>): void {
        for (const label of LABELS) {
            this.cell(`[data-preview="${label}"]`).textContent = String(preview[label] ?? 0);
        }
    }

    private cell(selector: string): HTMLElement {
        const el = this.root.querySelector<HTMLElement>(selector);
        if (!el) throw new Error(`balance widget is missing ${selector}`);
        return el;
    }
}
