import { readFileSync } from "node:fs";

export function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export function fixtureBytes(name: string): string {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return readFileSync(url, "utf-8");
}

/** Text of the cell for (rowAttr="rowId", data-field="field"). */
export function cell(
  html: string,
  rowAttr: string,
  rowId: string,
  field: string,
): string {
  const rowPattern = new RegExp(
    `<tr ${rowAttr}="${rowId}">([\\s\\S]*?)</tr>`,
  );
  const row = html.match(rowPattern);
  if (row === null) {
    throw new Error(`row ${rowAttr}=${rowId} not found`);
  }
  const cellPattern = new RegExp(
    `<td data-field="${field}">([\\s\\S]*?)</td>`,
  );
  const match = row[1]!.match(cellPattern);
  if (match === null) {
    throw new Error(`field ${field} not found in row ${rowId}`);
  }
  return match[1]!;
}

/** data-field spans/strong/code anywhere in the html. */
export function field(html: string, name: string): string {
  const pattern = new RegExp(
    `data-field="${name}">([\\s\\S]*?)</(?:span|strong|code|pre|td)>`,
  );
  const match = html.match(pattern);
  if (match === null) {
    throw new Error(`field ${name} not found`);
  }
  return match[1]!;
}

/** Order of data-vuln row ids in the html fragment. */
export function rowOrder(html: string, attr = "data-vuln"): string[] {
  const pattern = new RegExp(`<tr ${attr}="([^"]+)">`, "g");
  const out: string[] = [];
  for (const match of html.matchAll(pattern)) {
    out.push(match[1]!);
  }
  return out;
}
