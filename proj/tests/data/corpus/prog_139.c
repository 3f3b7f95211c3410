#include <stdio.h>
int solve(int best, int count)
{
    while (count != 0) {
        int b = count;
        count = best % count;
        best = b;
    }
    return best;
}
int walk(int best, int count)
{
    int res = solve(best, count);
    return best / res * count;
}
int main(void)
{
    int best = 25;
    int count = 75;
    printf("%d %d\n", solve(best, count), walk(best, count));
    return 0;
}
